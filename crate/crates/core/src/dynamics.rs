//! Finite measure-preserving dynamical systems and orbit extraction.
//!
//! A system is a permutation `tau` of a finite atom set together with
//! invariant weights: `mu(tau(i)) = mu(i)` exactly. Iterating `tau` (and its
//! inverse for negative times) realizes an invertible discrete-time action,
//! and sampling a field along an orbit produces the sequences the line
//! operators act on.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::function_spaces::{SampledSequence, VectorField, WeightedSpace};

/// A finite measure-preserving system: atoms, invariant weights, and an
/// invertible map stored with its precomputed inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationSystem {
    forward: Vec<usize>,
    inverse: Vec<usize>,
    space: Arc<WeightedSpace>,
}

impl PermutationSystem {
    /// Builds a system, checking that `forward` is a bijection and that the
    /// weights are exactly invariant under it.
    pub fn new(forward: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        let space = Arc::new(WeightedSpace::new(weights)?);
        let n = space.n_atoms();
        if forward.len() != n {
            return Err(Error::NotAPermutation);
        }
        let mut inverse = vec![usize::MAX; n];
        for (i, &img) in forward.iter().enumerate() {
            if img >= n || inverse[img] != usize::MAX {
                return Err(Error::NotAPermutation);
            }
            inverse[img] = i;
        }
        for i in 0..n {
            if space.weight(forward[i]) != space.weight(i) {
                return Err(Error::NonInvariantWeights { atom: i });
            }
        }
        Ok(PermutationSystem {
            forward,
            inverse,
            space,
        })
    }

    /// The cyclic shift `i -> i + 1 mod n` with uniform weights.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroParameter { name: "n_atoms" });
        }
        let forward = (0..n).map(|i| (i + 1) % n).collect();
        Self::new(forward, vec![1.0 / n as f64; n])
    }

    /// The rotation `i -> i + a mod q` with uniform weights; a single cycle
    /// exactly when `gcd(a, q) = 1`.
    pub fn rotation(q: usize, a: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroParameter { name: "q" });
        }
        let qi = q as i64;
        let step = a.rem_euclid(qi) as usize;
        let forward = (0..q).map(|i| (i + step) % q).collect();
        Self::new(forward, vec![1.0 / q as f64; q])
    }

    /// A uniformly random permutation with uniform weights, drawn by a
    /// seeded Fisher-Yates shuffle; identical seeds give identical systems.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroParameter { name: "n_atoms" });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut forward: Vec<usize> = (0..n).collect();
        forward.shuffle(&mut rng);
        Self::new(forward, vec![1.0 / n as f64; n])
    }

    pub fn n_atoms(&self) -> usize {
        self.space.n_atoms()
    }

    pub fn space(&self) -> &Arc<WeightedSpace> {
        &self.space
    }

    pub fn forward(&self, atom: usize) -> usize {
        self.forward[atom]
    }

    pub fn inverse(&self, atom: usize) -> usize {
        self.inverse[atom]
    }

    /// `tau^t(atom)` for any integer `t`.
    pub fn advance(&self, atom: usize, t: i64) -> usize {
        let mut x = atom;
        if t >= 0 {
            for _ in 0..t {
                x = self.forward[x];
            }
        } else {
            for _ in 0..(-t) {
                x = self.inverse[x];
            }
        }
        x
    }

    /// The cycle decomposition of the permutation, each cycle listed from its
    /// smallest atom.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n_atoms();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.forward[x];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Samples `field` along the orbit of `atom`: the sequence
    /// `t -> f(tau^t(atom))` on the window `[t_min, t_max]`, which must
    /// contain `t = 0`.
    pub fn orbit_trace(
        &self,
        field: &VectorField,
        atom: usize,
        t_min: i64,
        t_max: i64,
    ) -> Result<SampledSequence> {
        if field.space().as_ref() != self.space.as_ref() {
            return Err(Error::SpaceMismatch("field does not live on this system"));
        }
        if atom >= self.n_atoms() {
            return Err(Error::AtomOutOfRange {
                atom,
                n_atoms: self.n_atoms(),
            });
        }
        if t_min > 0 || t_max < 0 {
            return Err(Error::WindowMissingOrigin { t_min, t_max });
        }
        let width = (t_max - t_min + 1) as usize;
        let j = field.components();
        let mut orbit = Vec::with_capacity(width);
        let mut x = self.advance(atom, t_min);
        for step in 0..width {
            orbit.push(x);
            if step + 1 < width {
                x = self.forward[x];
            }
        }
        let mut values = Vec::with_capacity(j * width);
        for comp in 0..j {
            let row = field.component(comp);
            values.extend(orbit.iter().map(|&y| row[y]));
        }
        SampledSequence::new(j, t_min, values)
    }
}

/// Compact text description of a system, as consumed by the CLI:
/// `cyclic:N`, `rotation:q,a`, `random:N,seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemSpec {
    Cyclic { n: usize },
    Rotation { q: usize, a: i64 },
    Random { n: usize, seed: u64 },
}

impl SystemSpec {
    pub fn build(&self) -> Result<PermutationSystem> {
        match *self {
            SystemSpec::Cyclic { n } => PermutationSystem::cyclic(n),
            SystemSpec::Rotation { q, a } => PermutationSystem::rotation(q, a),
            SystemSpec::Random { n, seed } => PermutationSystem::random(n, seed),
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Cyclic { n } => write!(f, "cyclic:{n}"),
            SystemSpec::Rotation { q, a } => write!(f, "rotation:{q},{a}"),
            SystemSpec::Random { n, seed } => write!(f, "random:{n},{seed}"),
        }
    }
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &'static str| Error::InvalidSpec {
            input: s.to_string(),
            reason,
        };
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected `kind:params`"))?;
        match kind {
            "cyclic" => {
                let n: usize = rest.parse().map_err(|_| bad("expected `cyclic:N`"))?;
                if n == 0 {
                    return Err(bad("N must be at least 1"));
                }
                Ok(SystemSpec::Cyclic { n })
            }
            "rotation" => {
                let (q, a) = rest
                    .split_once(',')
                    .ok_or_else(|| bad("expected `rotation:q,a`"))?;
                let q: usize = q.parse().map_err(|_| bad("expected `rotation:q,a`"))?;
                let a: i64 = a.parse().map_err(|_| bad("expected `rotation:q,a`"))?;
                if q == 0 {
                    return Err(bad("q must be at least 1"));
                }
                Ok(SystemSpec::Rotation { q, a })
            }
            "random" => {
                let (n, seed) = rest
                    .split_once(',')
                    .ok_or_else(|| bad("expected `random:N,seed`"))?;
                let n: usize = n.parse().map_err(|_| bad("expected `random:N,seed`"))?;
                let seed: u64 = seed.parse().map_err(|_| bad("expected `random:N,seed`"))?;
                if n == 0 {
                    return Err(bad("N must be at least 1"));
                }
                Ok(SystemSpec::Random { n, seed })
            }
            _ => Err(bad("unknown system kind (cyclic|rotation|random)")),
        }
    }
}
