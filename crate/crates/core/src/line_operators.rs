//! Sublinear, translation-commuting, semilocal operator families on integer
//! sequences: one-sided averages, the one-sided maximal operator formed from
//! them, and the uncentered (Hardy-Littlewood style) maximal operator.
//!
//! Output windows shrink: a sample is emitted only where every average the
//! operator ranges over fits inside the input window, so no boundary value is
//! ever fabricated. All kernels accumulate each average left to right, which
//! makes them bit-identical to the naive enumeration the tests use as oracle.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function_spaces::SampledSequence;
use crate::seeding::trial_seed;

/// One of the shipped operator kinds, with its length parameter.
///
/// Semilocal radii: `avg:m` has `m - 1`, `osmax:n` has `n - 1`, `hl:n` has
/// `n` (its intervals extend up to `n` points on each side of the evaluation
/// point). All kinds are positive: outputs are nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineOperatorSpec {
    /// `t -> (1/m) * sum_{k=0}^{m-1} |f(t+k)|`
    OneSidedAverage { m: usize },
    /// `t -> max_{1<=m<=n_max}` of the one-sided averages
    OneSidedMaximal { n_max: usize },
    /// `t -> sup` of `|f|`-averages over intervals `[t-a, t+b]`, `0 <= a, b <= n_max`
    UncenteredMaximal { n_max: usize },
}

impl LineOperatorSpec {
    pub fn one_sided_average(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroParameter { name: "m" });
        }
        Ok(LineOperatorSpec::OneSidedAverage { m })
    }

    pub fn one_sided_maximal(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::ZeroParameter { name: "n_max" });
        }
        Ok(LineOperatorSpec::OneSidedMaximal { n_max })
    }

    pub fn uncentered_maximal(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::ZeroParameter { name: "n_max" });
        }
        Ok(LineOperatorSpec::UncenteredMaximal { n_max })
    }

    /// The semilocality radius: output support is contained in this
    /// neighborhood of the input support.
    pub fn semilocal_radius(&self) -> usize {
        match *self {
            LineOperatorSpec::OneSidedAverage { m } => m - 1,
            LineOperatorSpec::OneSidedMaximal { n_max } => n_max - 1,
            LineOperatorSpec::UncenteredMaximal { n_max } => n_max,
        }
    }

    /// The averaging-length parameter (`m` or `n_max`).
    pub fn length_param(&self) -> usize {
        match *self {
            LineOperatorSpec::OneSidedAverage { m } => m,
            LineOperatorSpec::OneSidedMaximal { n_max }
            | LineOperatorSpec::UncenteredMaximal { n_max } => n_max,
        }
    }

    /// How many samples beyond `t` the operator reads to the right.
    pub fn forward_reach(&self) -> usize {
        match *self {
            LineOperatorSpec::OneSidedAverage { m } => m - 1,
            LineOperatorSpec::OneSidedMaximal { n_max } => n_max - 1,
            LineOperatorSpec::UncenteredMaximal { n_max } => n_max,
        }
    }

    /// How many samples before `t` the operator reads to the left.
    pub fn backward_reach(&self) -> usize {
        match *self {
            LineOperatorSpec::OneSidedAverage { .. }
            | LineOperatorSpec::OneSidedMaximal { .. } => 0,
            LineOperatorSpec::UncenteredMaximal { n_max } => n_max,
        }
    }

    /// All shipped kinds produce nonnegative outputs.
    pub fn is_positive(&self) -> bool {
        true
    }

    /// Applies the operator to every component of `seq` independently.
    pub fn apply(&self, seq: &SampledSequence) -> Result<SampledSequence> {
        match *self {
            LineOperatorSpec::OneSidedAverage { m } => one_sided_average(seq, m),
            LineOperatorSpec::OneSidedMaximal { n_max } => one_sided_maximal(seq, n_max),
            LineOperatorSpec::UncenteredMaximal { n_max } => uncentered_maximal(seq, n_max),
        }
    }
}

impl fmt::Display for LineOperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineOperatorSpec::OneSidedAverage { m } => write!(f, "avg:{m}"),
            LineOperatorSpec::OneSidedMaximal { n_max } => write!(f, "osmax:{n_max}"),
            LineOperatorSpec::UncenteredMaximal { n_max } => write!(f, "hl:{n_max}"),
        }
    }
}

impl FromStr for LineOperatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &'static str| Error::InvalidSpec {
            input: s.to_string(),
            reason,
        };
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected `kind:param`"))?;
        let param: usize = rest
            .parse()
            .map_err(|_| bad("expected a positive integer parameter"))?;
        match kind {
            "avg" => LineOperatorSpec::one_sided_average(param)
                .map_err(|_| bad("m must be at least 1")),
            "osmax" => LineOperatorSpec::one_sided_maximal(param)
                .map_err(|_| bad("n_max must be at least 1")),
            "hl" => LineOperatorSpec::uncentered_maximal(param)
                .map_err(|_| bad("n_max must be at least 1")),
            _ => Err(bad("unknown operator kind (avg|osmax|hl)")),
        }
    }
}

/// `A_m f(t) = (1/m) * sum_{k=0}^{m-1} |f(t+k)|`, componentwise. The output
/// window is `[t_min, t_max - (m-1)]`.
pub fn one_sided_average(seq: &SampledSequence, m: usize) -> Result<SampledSequence> {
    if m == 0 {
        return Err(Error::ZeroParameter { name: "m" });
    }
    let width = seq.width();
    if width < m {
        return Err(Error::EmptyWindow { width, needed: m });
    }
    let out_width = width - (m - 1);
    let j = seq.components();
    let mut values = Vec::with_capacity(j * out_width);
    for comp in 0..j {
        let row = seq.component(comp);
        for q in 0..out_width {
            let mut acc = 0.0;
            for k in 0..m {
                acc += row[q + k].abs();
            }
            values.push(acc / m as f64);
        }
    }
    SampledSequence::new(j, seq.t_min(), values)
}

/// `max_{1<=m<=n_max} A_m f(t)`, componentwise. Emitted only where every
/// `m <= n_max` is evaluable, so the output window is
/// `[t_min, t_max - (n_max-1)]`.
pub fn one_sided_maximal(seq: &SampledSequence, n_max: usize) -> Result<SampledSequence> {
    if n_max == 0 {
        return Err(Error::ZeroParameter { name: "n_max" });
    }
    let width = seq.width();
    if width < n_max {
        return Err(Error::EmptyWindow {
            width,
            needed: n_max,
        });
    }
    let out_width = width - (n_max - 1);
    let j = seq.components();
    let mut values = Vec::with_capacity(j * out_width);
    for comp in 0..j {
        let row = seq.component(comp);
        for q in 0..out_width {
            let mut acc = 0.0;
            let mut best = f64::NEG_INFINITY;
            for m in 1..=n_max {
                acc += row[q + m - 1].abs();
                let avg = acc / m as f64;
                if avg > best {
                    best = avg;
                }
            }
            values.push(best);
        }
    }
    SampledSequence::new(j, seq.t_min(), values)
}

/// Discrete uncentered maximal function: the sup of `|f|`-averages over all
/// intervals `[t-a, t+b]` with `0 <= a, b <= n_max`. Output window
/// `[t_min + n_max, t_max - n_max]`.
pub fn uncentered_maximal(seq: &SampledSequence, n_max: usize) -> Result<SampledSequence> {
    if n_max == 0 {
        return Err(Error::ZeroParameter { name: "n_max" });
    }
    let width = seq.width();
    let needed = 2 * n_max + 1;
    if width < needed {
        return Err(Error::EmptyWindow { width, needed });
    }
    let out_width = width - 2 * n_max;
    let j = seq.components();
    let mut values = Vec::with_capacity(j * out_width);
    for comp in 0..j {
        let row = seq.component(comp);
        for q in 0..out_width {
            let center = q + n_max;
            let mut best = f64::NEG_INFINITY;
            for a in 0..=n_max {
                let mut acc = 0.0;
                for u in (center - a)..=center {
                    acc += row[u].abs();
                }
                let avg = acc / (a + 1) as f64;
                if avg > best {
                    best = avg;
                }
                for b in 1..=n_max {
                    acc += row[center + b].abs();
                    let avg = acc / (a + b + 1) as f64;
                    if avg > best {
                        best = avg;
                    }
                }
            }
            values.push(best);
        }
    }
    SampledSequence::new(j, seq.t_min() + n_max as i64, values)
}

/// Configuration for the randomized operator axiom checker.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheckConfig {
    pub n_trials: u64,
    pub seed: u64,
    pub components: usize,
    pub support_width: usize,
    pub tolerance: f64,
}

impl Default for AxiomCheckConfig {
    fn default() -> Self {
        AxiomCheckConfig {
            n_trials: 100,
            seed: 0xC0FFEE,
            components: 2,
            support_width: 24,
            tolerance: 1e-12,
        }
    }
}

/// A single recorded axiom failure.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub trial: u64,
    pub component: usize,
    pub t: i64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Result of checking sublinearity, translation commutation and
/// semilocality on seeded random inputs.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub operator: String,
    pub trials: u64,
    pub checks: u64,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

fn random_sequence(
    rng: &mut ChaCha8Rng,
    components: usize,
    support_width: usize,
    pad: usize,
) -> SampledSequence {
    let start: i64 = rng.random_range(-10..=10);
    let t_min = start - pad as i64;
    let width = support_width + 2 * pad;
    let mut values = vec![0.0; components * width];
    for comp in 0..components {
        for k in 0..support_width {
            values[comp * width + pad + k] = rng.random_range(-1.0..1.0);
        }
    }
    SampledSequence::new(components, t_min, values).expect("valid window")
}

/// Support of a sequence: times where any component is nonzero.
fn support(seq: &SampledSequence) -> Vec<i64> {
    let mut out = Vec::new();
    for t in seq.t_min()..=seq.t_max() {
        if (0..seq.components()).any(|j| seq.value(j, t) != 0.0) {
            out.push(t);
        }
    }
    out
}

/// Randomized verification that the operator is sublinear, commutes with
/// translations, and is semilocal with its declared radius. Failures are
/// recorded, not raised.
pub fn check_operator_axioms(op: &LineOperatorSpec, cfg: &AxiomCheckConfig) -> AxiomReport {
    let pad = op.backward_reach() + op.forward_reach() + op.semilocal_radius() + 2;
    let results = crate::exec::map_indexed(cfg.n_trials as usize, |trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, trial as u64));
        let mut checks = 0u64;
        let mut violations = Vec::new();
        let trial = trial as u64;

        let f = random_sequence(&mut rng, cfg.components, cfg.support_width, pad);

        // sublinearity: T(f+g) <= Tf + Tg pointwise
        {
            let g = random_sequence(&mut rng, cfg.components, cfg.support_width, pad);
            // overlay g's samples onto f's window (both windows contain both supports
            // only if aligned; simplest is to add on the intersection grid of f)
            let sum = SampledSequence::from_fn(
                cfg.components,
                f.t_min(),
                f.t_max(),
                |j, t| f.value(j, t) + if g.contains(t) { g.value(j, t) } else { 0.0 },
            )
            .expect("valid window");
            let g_on_f = SampledSequence::from_fn(cfg.components, f.t_min(), f.t_max(), |j, t| {
                if g.contains(t) {
                    g.value(j, t)
                } else {
                    0.0
                }
            })
            .expect("valid window");
            let tf = op.apply(&f).expect("window fits");
            let tg = op.apply(&g_on_f).expect("window fits");
            let th = op.apply(&sum).expect("window fits");
            for j in 0..cfg.components {
                for t in th.t_min()..=th.t_max() {
                    checks += 1;
                    let lhs = th.value(j, t);
                    let rhs = tf.value(j, t) + tg.value(j, t);
                    if lhs > rhs + cfg.tolerance {
                        violations.push(AxiomViolation {
                            axiom: "sublinearity",
                            trial,
                            component: j,
                            t,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }

        // translation commutation: T(shift_s f) = shift_s(T f) on the overlap
        {
            let s: i64 = rng.random_range(-6..=6);
            let extra = 3i64;
            let shifted = SampledSequence::from_fn(
                cfg.components,
                f.t_min() + s - extra,
                f.t_max() + s + extra,
                |j, t| {
                    if f.contains(t - s) {
                        f.value(j, t - s)
                    } else {
                        0.0
                    }
                },
            )
            .expect("valid window");
            let tf = op.apply(&f).expect("window fits");
            let ts = op.apply(&shifted).expect("window fits");
            for j in 0..cfg.components {
                for t in ts.t_min()..=ts.t_max() {
                    if !tf.contains(t - s) {
                        continue;
                    }
                    checks += 1;
                    let lhs = ts.value(j, t);
                    let rhs = tf.value(j, t - s);
                    if (lhs - rhs).abs() > cfg.tolerance {
                        violations.push(AxiomViolation {
                            axiom: "translation",
                            trial,
                            component: j,
                            t,
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }

        // semilocality: output support within the declared radius of the input support
        {
            let tf = op.apply(&f).expect("window fits");
            let in_support = support(&f);
            let eps = op.semilocal_radius() as i64;
            for t in support(&tf) {
                checks += 1;
                let near = in_support
                    .iter()
                    .any(|&u| (t - u).abs() <= eps);
                if !near {
                    let lhs = (0..cfg.components)
                        .map(|j| tf.value(j, t).abs())
                        .fold(0.0, f64::max);
                    violations.push(AxiomViolation {
                        axiom: "semilocality",
                        trial,
                        component: 0,
                        t,
                        lhs,
                        rhs: 0.0,
                    });
                }
            }
        }

        (checks, violations)
    });

    let mut checks = 0u64;
    let mut violations = Vec::new();
    for (c, mut v) in results {
        checks += c;
        violations.append(&mut v);
    }
    AxiomReport {
        operator: op.to_string(),
        trials: cfg.n_trials,
        checks,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_at(components: usize, pos: i64, t_min: i64, t_max: i64) -> SampledSequence {
        SampledSequence::from_fn(components, t_min, t_max, |_, t| {
            if t == pos {
                1.0
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn spec_parsing_and_radii() {
        let avg: LineOperatorSpec = "avg:3".parse().unwrap();
        assert_eq!(avg.semilocal_radius(), 2);
        let os: LineOperatorSpec = "osmax:8".parse().unwrap();
        assert_eq!(os.semilocal_radius(), 7);
        let hl: LineOperatorSpec = "hl:8".parse().unwrap();
        assert_eq!(hl.semilocal_radius(), 8);
        assert!("avg:0".parse::<LineOperatorSpec>().is_err());
        assert!("osmax:".parse::<LineOperatorSpec>().is_err());
        assert!("med:3".parse::<LineOperatorSpec>().is_err());
        for s in ["avg:3", "osmax:8", "hl:8"] {
            assert_eq!(s.parse::<LineOperatorSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn average_m1_is_abs() {
        let seq = SampledSequence::from_fn(1, -3, 3, |_, t| -(t as f64)).unwrap();
        let out = one_sided_average(&seq, 1).unwrap();
        for t in -3..=3 {
            assert_eq!(out.value(0, t), (t as f64).abs());
        }
    }

    #[test]
    fn average_of_delta() {
        let seq = delta_at(1, 0, -5, 5);
        let out = one_sided_average(&seq, 3).unwrap();
        assert_eq!(out.t_max(), 3);
        for t in -5..=3 {
            let expected = if (-2..=0).contains(&t) { 1.0 / 3.0 } else { 0.0 };
            assert_eq!(out.value(0, t), expected);
        }
    }

    #[test]
    fn average_of_constant() {
        let seq = SampledSequence::from_fn(2, -4, 4, |_, _| 0.75).unwrap();
        let out = one_sided_average(&seq, 4).unwrap();
        for j in 0..2 {
            for t in out.t_min()..=out.t_max() {
                assert_eq!(out.value(j, t), 0.75);
            }
        }
    }

    #[test]
    fn window_too_small_is_rejected() {
        let seq = delta_at(1, 0, 0, 1);
        assert!(matches!(
            one_sided_average(&seq, 3),
            Err(Error::EmptyWindow { .. })
        ));
        assert!(matches!(
            uncentered_maximal(&seq, 1),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn one_sided_maximal_delta_law() {
        let seq = delta_at(1, 0, -12, 12);
        let out = one_sided_maximal(&seq, 8).unwrap();
        for d in 0..=7i64 {
            assert_eq!(out.value(0, -d), 1.0 / (d as f64 + 1.0));
        }
        // forward windows never meet mass that lies behind the evaluation point
        assert_eq!(out.value(0, 1), 0.0);
        assert_eq!(out.value(0, 3), 0.0);
    }

    #[test]
    fn one_sided_maximal_constant() {
        let seq = SampledSequence::from_fn(1, -6, 9, |_, _| 2.5).unwrap();
        let out = one_sided_maximal(&seq, 5).unwrap();
        for t in out.t_min()..=out.t_max() {
            assert_eq!(out.value(0, t), 2.5);
        }
    }

    #[test]
    fn uncentered_delta_law() {
        let seq = delta_at(1, 0, -16, 16);
        let n_max = 6;
        let out = uncentered_maximal(&seq, n_max).unwrap();
        for t in out.t_min()..=out.t_max() {
            let d = t.unsigned_abs() as usize;
            let expected = if d <= n_max {
                1.0 / (d as f64 + 1.0)
            } else {
                0.0
            };
            assert_eq!(out.value(0, t), expected, "t={t}");
        }
    }

    #[test]
    fn uncentered_two_masses() {
        let seq = SampledSequence::from_fn(1, -8, 10, |_, t| {
            if t == 0 || t == 2 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let out = uncentered_maximal(&seq, 1).unwrap();
        assert_eq!(out.value(0, 1), 2.0 / 3.0);
    }

    #[test]
    fn componentwise_action() {
        let op = LineOperatorSpec::one_sided_maximal(3).unwrap();
        let seq = SampledSequence::from_fn(2, -6, 6, |j, t| {
            if j == 0 {
                (t as f64) * 0.5
            } else {
                0.0
            }
        })
        .unwrap();
        let out = op.apply(&seq).unwrap();
        for t in out.t_min()..=out.t_max() {
            assert_eq!(out.value(1, t), 0.0);
        }
        // equal components give equal outputs
        let twin = SampledSequence::from_fn(2, -6, 6, |_, t| (t as f64) * 0.5).unwrap();
        let out = op.apply(&twin).unwrap();
        for t in out.t_min()..=out.t_max() {
            assert_eq!(out.value(0, t), out.value(1, t));
        }
    }

    #[test]
    fn axioms_pass_on_seeded_inputs() {
        for op in [
            LineOperatorSpec::one_sided_maximal(4).unwrap(),
            LineOperatorSpec::uncentered_maximal(4).unwrap(),
            LineOperatorSpec::one_sided_average(3).unwrap(),
        ] {
            let report = check_operator_axioms(&op, &AxiomCheckConfig::default());
            assert!(report.pass(), "{op}: {:?}", report.violations.first());
            assert!(report.checks > 0);
        }
    }

    #[test]
    fn semilocality_of_uncentered_is_tight() {
        let n_max = 5;
        let seq = delta_at(1, 0, -20, 20);
        let out = uncentered_maximal(&seq, n_max).unwrap();
        let support: Vec<i64> = (out.t_min()..=out.t_max())
            .filter(|&t| out.value(0, t) != 0.0)
            .collect();
        let expected: Vec<i64> = (-(n_max as i64)..=n_max as i64).collect();
        assert_eq!(support, expected);
    }

    #[test]
    fn zero_sequence_has_empty_output_support() {
        let seq = SampledSequence::from_fn(2, -9, 9, |_, _| 0.0).unwrap();
        for op in [
            LineOperatorSpec::one_sided_average(2).unwrap(),
            LineOperatorSpec::one_sided_maximal(4).unwrap(),
            LineOperatorSpec::uncentered_maximal(3).unwrap(),
        ] {
            let out = op.apply(&seq).unwrap();
            assert!(support(&out).is_empty());
        }
    }

    // Naive oracles: literal definitions, each average summed independently
    // left to right. The production kernels must match them bit for bit.

    fn naive_avg(seq: &SampledSequence, m: usize) -> SampledSequence {
        let j = seq.components();
        SampledSequence::from_fn(j, seq.t_min(), seq.t_max() - (m as i64 - 1), |comp, t| {
            let mut acc = 0.0;
            for k in 0..m as i64 {
                acc += seq.value(comp, t + k).abs();
            }
            acc / m as f64
        })
        .unwrap()
    }

    fn naive_osmax(seq: &SampledSequence, n_max: usize) -> SampledSequence {
        let j = seq.components();
        SampledSequence::from_fn(j, seq.t_min(), seq.t_max() - (n_max as i64 - 1), |comp, t| {
            let mut best = f64::NEG_INFINITY;
            for m in 1..=n_max {
                let mut acc = 0.0;
                for k in 0..m as i64 {
                    acc += seq.value(comp, t + k).abs();
                }
                let avg = acc / m as f64;
                if avg > best {
                    best = avg;
                }
            }
            best
        })
        .unwrap()
    }

    fn naive_hl(seq: &SampledSequence, n_max: usize) -> SampledSequence {
        let j = seq.components();
        let r = n_max as i64;
        SampledSequence::from_fn(j, seq.t_min() + r, seq.t_max() - r, |comp, t| {
            let mut best = f64::NEG_INFINITY;
            for a in 0..=r {
                for b in 0..=r {
                    let mut acc = 0.0;
                    for u in (t - a)..=(t + b) {
                        acc += seq.value(comp, u).abs();
                    }
                    let avg = acc / (a + b + 1) as f64;
                    if avg > best {
                        best = avg;
                    }
                }
            }
            best
        })
        .unwrap()
    }

    fn assert_bitwise_equal(a: &SampledSequence, b: &SampledSequence) {
        assert_eq!(a.t_min(), b.t_min());
        assert_eq!(a.t_max(), b.t_max());
        assert_eq!(a.components(), b.components());
        for j in 0..a.components() {
            for t in a.t_min()..=a.t_max() {
                assert_eq!(
                    a.value(j, t).to_bits(),
                    b.value(j, t).to_bits(),
                    "mismatch at j={j} t={t}"
                );
            }
        }
    }

    #[test]
    fn production_matches_naive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(2026);
        for case in 0..60 {
            let width = rng.random_range(17..=64usize);
            let n_max = rng.random_range(1..=8usize);
            let j = rng.random_range(1..=3usize);
            let t_min = -(rng.random_range(0..width as i64));
            let values: Vec<f64> = (0..j * width)
                .map(|_| rng.random_range(-4.0..4.0))
                .collect();
            let seq = SampledSequence::new(j, t_min, values).unwrap();

            assert_bitwise_equal(&one_sided_average(&seq, n_max).unwrap(), &naive_avg(&seq, n_max));
            assert_bitwise_equal(
                &one_sided_maximal(&seq, n_max).unwrap(),
                &naive_osmax(&seq, n_max),
            );
            if width >= 2 * n_max + 1 {
                assert_bitwise_equal(
                    &uncentered_maximal(&seq, n_max).unwrap(),
                    &naive_hl(&seq, n_max),
                );
            }
            let _ = case;
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn ops(n_max: usize) -> Vec<LineOperatorSpec> {
            vec![
                LineOperatorSpec::OneSidedAverage { m: n_max },
                LineOperatorSpec::OneSidedMaximal { n_max },
                LineOperatorSpec::UncenteredMaximal { n_max },
            ]
        }

        proptest! {
            #[test]
            fn monotone_in_absolute_value(
                values in proptest::collection::vec(-3.0f64..3.0, 24),
                shrink in proptest::collection::vec(0.0f64..1.0, 24),
                n_max in 1usize..5,
            ) {
                let f = SampledSequence::new(1, -12, values.clone()).unwrap();
                let smaller: Vec<f64> =
                    values.iter().zip(&shrink).map(|(v, s)| v * s).collect();
                let g = SampledSequence::new(1, -12, smaller).unwrap();
                for op in ops(n_max) {
                    let tf = op.apply(&f).unwrap();
                    let tg = op.apply(&g).unwrap();
                    for t in tf.t_min()..=tf.t_max() {
                        prop_assert!(tg.value(0, t) <= tf.value(0, t) + 1e-12);
                    }
                }
            }

            #[test]
            fn positive_homogeneity(
                values in proptest::collection::vec(-3.0f64..3.0, 20),
                c in -4.0f64..4.0,
                n_max in 1usize..5,
            ) {
                let f = SampledSequence::new(1, -10, values.clone()).unwrap();
                let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
                let g = SampledSequence::new(1, -10, scaled).unwrap();
                for op in ops(n_max) {
                    let tf = op.apply(&f).unwrap();
                    let tg = op.apply(&g).unwrap();
                    for t in tf.t_min()..=tf.t_max() {
                        let expect = c.abs() * tf.value(0, t);
                        prop_assert!((tg.value(0, t) - expect).abs() <= 1e-12 * (1.0 + expect));
                    }
                }
            }

            #[test]
            fn one_sided_below_uncentered(
                values in proptest::collection::vec(-3.0f64..3.0, 25),
                n_max in 1usize..6,
            ) {
                let f = SampledSequence::new(1, -12, values).unwrap();
                let os = one_sided_maximal(&f, n_max).unwrap();
                let un = uncentered_maximal(&f, n_max).unwrap();
                for t in un.t_min()..=un.t_max() {
                    prop_assert!(os.value(0, t) <= un.value(0, t) + 1e-15);
                }
            }

            #[test]
            fn nesting_in_n_max(
                values in proptest::collection::vec(-3.0f64..3.0, 30),
                n_small in 1usize..4,
            ) {
                let f = SampledSequence::new(1, -15, values).unwrap();
                let n_big = n_small + 2;
                let small_os = one_sided_maximal(&f, n_small).unwrap();
                let big_os = one_sided_maximal(&f, n_big).unwrap();
                for t in big_os.t_min()..=big_os.t_max() {
                    prop_assert!(small_os.value(0, t) <= big_os.value(0, t) + 1e-15);
                }
                let small_hl = uncentered_maximal(&f, n_small).unwrap();
                let big_hl = uncentered_maximal(&f, n_big).unwrap();
                for t in big_hl.t_min()..=big_hl.t_max() {
                    prop_assert!(small_hl.value(0, t) <= big_hl.value(0, t) + 1e-15);
                }
            }
        }
    }
}
