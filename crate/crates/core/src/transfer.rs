//! The transfer construction: a line operator applied along orbits of a
//! finite measure-preserving system, the directly-defined ergodic maximal
//! function that serves as its exact oracle, trace truncation, and the
//! equimeasurability checks the transfer argument rests on.
//!
//! For an atom `x`, the sampled orbit `t -> f(tau^t x)` plays the role of a
//! function on the line. Applying a line operator to it and reading the value
//! at `t = 0` defines the transferred operator. On finite systems the orbit
//! is periodic, so this value is exact once the evaluation window is wide
//! enough; widening it further never changes the result.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::PermutationSystem;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::function_spaces::{SampledSequence, VectorField};
use crate::line_operators::LineOperatorSpec;
use crate::seeding::trial_seed;

/// A line operator evaluated along orbits of a system, on the window
/// `[-w, w]`.
#[derive(Debug, Clone)]
pub struct TransferredOperator {
    line_op: LineOperatorSpec,
    system: Arc<PermutationSystem>,
    window_halfwidth: usize,
}

impl TransferredOperator {
    /// The default evaluation window: `semilocal_radius + length + 1`, which
    /// is wide enough for the value at `t = 0` and every certificate trace.
    pub fn new(line_op: LineOperatorSpec, system: Arc<PermutationSystem>) -> Self {
        let w = line_op.semilocal_radius() + line_op.length_param() + 1;
        TransferredOperator {
            line_op,
            system,
            window_halfwidth: w,
        }
    }

    /// Overrides the evaluation window; rejects anything below the minimum
    /// that makes the `t = 0` value window-independent.
    pub fn with_window(
        line_op: LineOperatorSpec,
        system: Arc<PermutationSystem>,
        window_halfwidth: usize,
    ) -> Result<Self> {
        let minimum = Self::min_window_halfwidth(&line_op);
        if window_halfwidth < minimum {
            return Err(Error::WindowTooSmall {
                given: window_halfwidth,
                minimum,
            });
        }
        Ok(TransferredOperator {
            line_op,
            system,
            window_halfwidth,
        })
    }

    /// The smallest admissible halfwidth for a given line operator.
    pub fn min_window_halfwidth(line_op: &LineOperatorSpec) -> usize {
        line_op.semilocal_radius() + line_op.length_param()
    }

    pub fn line_op(&self) -> &LineOperatorSpec {
        &self.line_op
    }

    pub fn system(&self) -> &Arc<PermutationSystem> {
        &self.system
    }

    pub fn window_halfwidth(&self) -> usize {
        self.window_halfwidth
    }

    /// Applies the transferred operator: for each atom build the orbit trace
    /// on `[-w, w]`, apply the line operator componentwise, and read the
    /// value at `t = 0`. Atoms are evaluated independently (in parallel with
    /// the `parallel` feature) and gathered in atom order.
    pub fn apply(&self, field: &VectorField) -> Result<VectorField> {
        if field.space().as_ref() != self.system.space().as_ref() {
            return Err(Error::SpaceMismatch(
                "field does not live on the operator's system",
            ));
        }
        let n = self.system.n_atoms();
        let j = field.components();
        let w = self.window_halfwidth as i64;
        let per_atom: Vec<Result<Vec<f64>>> = map_indexed(n, |atom| {
            let trace = self.system.orbit_trace(field, atom, -w, w)?;
            let out = self.line_op.apply(&trace)?;
            Ok((0..j).map(|comp| out.value(comp, 0)).collect())
        });
        let mut values = vec![0.0; j * n];
        for (atom, cell) in per_atom.into_iter().enumerate() {
            let cell = cell?;
            for (comp, v) in cell.into_iter().enumerate() {
                values[comp * n + atom] = v;
            }
        }
        VectorField::new(Arc::clone(field.space()), j, values)
    }
}

/// The ergodic maximal function
/// `max_{1<=n<=n_max} (1/n) sum_{k=0}^{n-1} |f(tau^k x)|`, componentwise,
/// evaluated directly from the orbit. Serves as the independent oracle for
/// the transferred one-sided maximal operator: both accumulate the Birkhoff
/// sums in the same order, so they agree bit for bit.
pub fn ergodic_maximal(
    system: &PermutationSystem,
    field: &VectorField,
    n_max: usize,
) -> Result<VectorField> {
    if n_max == 0 {
        return Err(Error::ZeroParameter { name: "n_max" });
    }
    if field.space().as_ref() != system.space().as_ref() {
        return Err(Error::SpaceMismatch("field does not live on this system"));
    }
    let n = system.n_atoms();
    let j = field.components();
    let per_atom: Vec<Vec<f64>> = map_indexed(n, |atom| {
        let mut acc = vec![0.0f64; j];
        let mut best = vec![f64::NEG_INFINITY; j];
        let mut x = atom;
        for step in 1..=n_max {
            for comp in 0..j {
                acc[comp] += field.value(comp, x).abs();
                let avg = acc[comp] / step as f64;
                if avg > best[comp] {
                    best[comp] = avg;
                }
            }
            x = system.forward(x);
        }
        best
    });
    let mut values = vec![0.0; j * n];
    for (atom, cell) in per_atom.into_iter().enumerate() {
        for (comp, v) in cell.into_iter().enumerate() {
            values[comp * n + atom] = v;
        }
    }
    VectorField::new(Arc::clone(field.space()), j, values)
}

/// Zeroes every sample with `|t| >= a`; the window itself is unchanged.
pub fn truncate_trace(seq: &SampledSequence, a: usize) -> Result<SampledSequence> {
    if a == 0 {
        return Err(Error::ZeroParameter { name: "a" });
    }
    let a = a as i64;
    SampledSequence::from_fn(seq.components(), seq.t_min(), seq.t_max(), |j, t| {
        if t.abs() >= a {
            0.0
        } else {
            seq.value(j, t)
        }
    })
}

/// A single equimeasurability failure.
#[derive(Debug, Clone, Serialize)]
pub struct EquimeasurabilityViolation {
    pub kind: &'static str,
    pub trial: u64,
    pub shift: i64,
    pub t: i64,
    pub detail: String,
}

/// Result of the equimeasurability checks.
#[derive(Debug, Clone, Serialize)]
pub struct EquimeasurabilityReport {
    pub operator: String,
    pub cases: u64,
    pub checks: u64,
    pub violations: Vec<EquimeasurabilityViolation>,
}

impl EquimeasurabilityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Configuration of the equimeasurability checker.
#[derive(Debug, Clone, Serialize)]
pub struct EquimeasurabilityConfig {
    pub n_trials: u64,
    pub seed: u64,
    pub components: usize,
    /// Distribution equality is checked for `|t| <= t_range`.
    pub t_range: i64,
}

impl Default for EquimeasurabilityConfig {
    fn default() -> Self {
        EquimeasurabilityConfig {
            n_trials: 50,
            seed: 0xC0FFEE,
            components: 2,
            t_range: 3,
        }
    }
}

/// Builds the full matrix `G(t, x)` for `|t| <= t_range` by applying the
/// line operator to each atom's orbit trace on a window wide enough that
/// every requested `t` is evaluable.
fn transferred_matrix(
    system: &PermutationSystem,
    field: &VectorField,
    line_op: &LineOperatorSpec,
    t_range: i64,
) -> Result<Vec<SampledSequence>> {
    let margin = (line_op.backward_reach() + line_op.forward_reach() + 1) as i64;
    let w = t_range + margin;
    let rows: Vec<Result<SampledSequence>> = map_indexed(system.n_atoms(), |atom| {
        let trace = system.orbit_trace(field, atom, -w, w)?;
        line_op.apply(&trace)
    });
    rows.into_iter().collect()
}

/// Checks, for one `(field, shift)` pair, that `G(t, tau^s x) = G(t+s, x)`
/// exactly, and that the weighted value distributions of `x -> G(t, x)` and
/// `x -> G(0, x)` coincide for every `|t| <= t_range`.
pub fn equimeasurability_case(
    system: &PermutationSystem,
    field: &VectorField,
    line_op: &LineOperatorSpec,
    shift: i64,
    t_range: i64,
    trial: u64,
) -> Result<(u64, Vec<EquimeasurabilityViolation>)> {
    let mut checks = 0u64;
    let mut violations = Vec::new();
    let j = field.components();
    let n = system.n_atoms();

    let wide = transferred_matrix(system, field, line_op, t_range + shift.abs())?;

    // shift identity, exact
    for x in 0..n {
        let moved = system.advance(x, shift);
        for t in -t_range..=t_range {
            for comp in 0..j {
                checks += 1;
                let lhs = wide[moved].value(comp, t);
                let rhs = wide[x].value(comp, t + shift);
                if lhs.to_bits() != rhs.to_bits() {
                    violations.push(EquimeasurabilityViolation {
                        kind: "shift_identity",
                        trial,
                        shift,
                        t,
                        detail: format!("atom {x} component {comp}: {lhs} != {rhs}"),
                    });
                }
            }
        }
    }

    // distribution equality: sorted (value, weight) multisets agree with t = 0
    let weights = system.space().weights();
    let sorted_slice = |t: i64, comp: usize| -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = (0..n)
            .map(|x| (wide[x].value(comp, t), weights[x]))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        v
    };
    for comp in 0..j {
        let base = sorted_slice(0, comp);
        for t in -t_range..=t_range {
            checks += 1;
            if sorted_slice(t, comp) != base {
                violations.push(EquimeasurabilityViolation {
                    kind: "distribution",
                    trial,
                    shift,
                    t,
                    detail: format!("component {comp}: value distribution differs from t=0"),
                });
            }
        }
    }

    Ok((checks, violations))
}

/// Runs [`equimeasurability_case`] over seeded random fields and shifts.
pub fn check_equimeasurability(
    system: &PermutationSystem,
    line_op: &LineOperatorSpec,
    cfg: &EquimeasurabilityConfig,
) -> Result<EquimeasurabilityReport> {
    let results: Vec<Result<(u64, Vec<EquimeasurabilityViolation>)>> =
        map_indexed(cfg.n_trials as usize, |trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, trial as u64));
            let field = VectorField::new(
                Arc::clone(system.space()),
                cfg.components,
                (0..cfg.components * system.n_atoms())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect(),
            )?;
            let shift: i64 = rng.random_range(-8..=8);
            equimeasurability_case(system, &field, line_op, shift, cfg.t_range, trial as u64)
        });
    let mut checks = 0u64;
    let mut violations = Vec::new();
    for r in results {
        let (c, mut v) = r?;
        checks += c;
        violations.append(&mut v);
    }
    Ok(EquimeasurabilityReport {
        operator: line_op.to_string(),
        cases: cfg.n_trials,
        checks,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SystemSpec;

    fn dyadic_field(system: &PermutationSystem, components: usize, seed: u64) -> VectorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        VectorField::new(
            Arc::clone(system.space()),
            components,
            (0..components * system.n_atoms())
                .map(|_| rng.random_range(-8..=8i32) as f64 / 8.0)
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_magnitude_transfer() {
        let system = Arc::new(PermutationSystem::cyclic(7).unwrap());
        let field = dyadic_field(&system, 2, 1);
        let top = TransferredOperator::new(
            LineOperatorSpec::one_sided_average(1).unwrap(),
            Arc::clone(&system),
        );
        let out = top.apply(&field).unwrap();
        for j in 0..2 {
            for x in 0..7 {
                assert_eq!(out.value(j, x), field.value(j, x).abs());
            }
        }
    }

    #[test]
    fn fixed_point_orbits_give_abs() {
        let system = Arc::new(PermutationSystem::rotation(5, 0).unwrap());
        let field = dyadic_field(&system, 3, 2);
        let top = TransferredOperator::new(
            LineOperatorSpec::one_sided_maximal(6).unwrap(),
            Arc::clone(&system),
        );
        let out = top.apply(&field).unwrap();
        for j in 0..3 {
            for x in 0..5 {
                assert_eq!(out.value(j, x), field.value(j, x).abs());
            }
        }
    }

    #[test]
    fn transfer_matches_ergodic_maximal_bitwise() {
        for spec in [
            SystemSpec::Cyclic { n: 10 },
            SystemSpec::Rotation { q: 12, a: 5 },
            SystemSpec::Random { n: 16, seed: 3 },
        ] {
            let system = Arc::new(spec.build().unwrap());
            let field = dyadic_field(&system, 2, 7);
            for n_max in [1usize, 4, 9] {
                let top = TransferredOperator::new(
                    LineOperatorSpec::one_sided_maximal(n_max).unwrap(),
                    Arc::clone(&system),
                );
                let via_transfer = top.apply(&field).unwrap();
                let direct = ergodic_maximal(&system, &field, n_max).unwrap();
                for j in 0..2 {
                    for x in 0..system.n_atoms() {
                        assert_eq!(
                            via_transfer.value(j, x).to_bits(),
                            direct.value(j, x).to_bits(),
                            "{spec:?} n_max={n_max} j={j} x={x}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn ergodic_maximal_delta_law() {
        let system = PermutationSystem::cyclic(10).unwrap();
        let field = VectorField::indicator(Arc::clone(system.space()), 4).unwrap();
        let out = ergodic_maximal(&system, &field, 10).unwrap();
        for x in 0..10 {
            let d = (4 + 10 - x) % 10;
            assert_eq!(out.value(0, x), 1.0 / (d as f64 + 1.0));
        }
    }

    #[test]
    fn ergodic_maximal_constant_and_identity() {
        let system = PermutationSystem::cyclic(6).unwrap();
        let c = VectorField::from_fn(Arc::clone(system.space()), 1, |_, _| 0.625).unwrap();
        let out = ergodic_maximal(&system, &c, 4).unwrap();
        for x in 0..6 {
            assert_eq!(out.value(0, x), 0.625);
        }

        let id = PermutationSystem::rotation(6, 0).unwrap();
        let f = dyadic_field(&id, 1, 5);
        let out = ergodic_maximal(&id, &f, 5).unwrap();
        for x in 0..6 {
            assert_eq!(out.value(0, x), f.value(0, x).abs());
        }
    }

    #[test]
    fn window_stability() {
        let system = Arc::new(PermutationSystem::rotation(20, 7).unwrap());
        let field = dyadic_field(&system, 2, 11);
        for op in [
            LineOperatorSpec::one_sided_maximal(5).unwrap(),
            LineOperatorSpec::uncentered_maximal(4).unwrap(),
            LineOperatorSpec::one_sided_average(3).unwrap(),
        ] {
            let base = TransferredOperator::new(op, Arc::clone(&system))
                .apply(&field)
                .unwrap();
            let min_w = TransferredOperator::min_window_halfwidth(&op);
            for w in [min_w, min_w + 1, min_w + 9, min_w + 30] {
                let out = TransferredOperator::with_window(op, Arc::clone(&system), w)
                    .unwrap()
                    .apply(&field)
                    .unwrap();
                assert_eq!(out, base, "{op} w={w}");
            }
        }
    }

    #[test]
    fn window_below_minimum_rejected() {
        let system = Arc::new(PermutationSystem::cyclic(8).unwrap());
        let op = LineOperatorSpec::one_sided_maximal(4).unwrap();
        let min_w = TransferredOperator::min_window_halfwidth(&op);
        assert!(matches!(
            TransferredOperator::with_window(op, Arc::clone(&system), min_w - 1),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn truncate_trace_semantics() {
        let seq = SampledSequence::from_fn(1, -5, 5, |_, t| (t + 10) as f64).unwrap();
        // a larger than the halfwidth: unchanged
        assert_eq!(truncate_trace(&seq, 6).unwrap(), seq);
        // a = 1: only t = 0 survives
        let t1 = truncate_trace(&seq, 1).unwrap();
        for t in -5..=5 {
            let expected = if t == 0 { 10.0 } else { 0.0 };
            assert_eq!(t1.value(0, t), expected);
        }
        // delta at t = 3 dies under a = 3
        let delta = SampledSequence::from_fn(1, -5, 5, |_, t| if t == 3 { 1.0 } else { 0.0 })
            .unwrap();
        let out = truncate_trace(&delta, 3).unwrap();
        for t in -5..=5 {
            assert_eq!(out.value(0, t), 0.0);
        }
        assert!(truncate_trace(&seq, 0).is_err());
    }

    #[test]
    fn domination_by_truncated_traces() {
        // G <= G^(a+eps) on |t| <= a, where the truncation keeps |t| <= a+eps.
        let system = PermutationSystem::rotation(24, 7).unwrap();
        let field = dyadic_field(&system, 2, 13);
        let a = 4usize;
        for op in [
            LineOperatorSpec::one_sided_maximal(3).unwrap(),
            LineOperatorSpec::uncentered_maximal(3).unwrap(),
            LineOperatorSpec::one_sided_average(4).unwrap(),
        ] {
            let eps = op.semilocal_radius();
            let w = (a + 2 * eps + op.length_param() + 1) as i64;
            for atom in 0..system.n_atoms() {
                let trace = system.orbit_trace(&field, atom, -w, w).unwrap();
                let truncated = truncate_trace(&trace, a + eps + 1).unwrap();
                let g = op.apply(&trace).unwrap();
                let gb = op.apply(&truncated).unwrap();
                for j in 0..2 {
                    for t in -(a as i64)..=(a as i64) {
                        assert!(
                            g.value(j, t) <= gb.value(j, t) + 1e-15,
                            "{op} atom={atom} j={j} t={t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn transfer_commutes_with_the_action() {
        // (T# f) o tau = T# (f o tau), exactly.
        let system = Arc::new(PermutationSystem::random(18, 5).unwrap());
        let field = dyadic_field(&system, 2, 17);
        let composed = VectorField::from_fn(Arc::clone(system.space()), 2, |j, x| {
            field.value(j, system.forward(x))
        })
        .unwrap();
        for op in [
            LineOperatorSpec::one_sided_maximal(4).unwrap(),
            LineOperatorSpec::uncentered_maximal(3).unwrap(),
        ] {
            let top = TransferredOperator::new(op, Arc::clone(&system));
            let lhs = top.apply(&field).unwrap();
            let rhs = top.apply(&composed).unwrap();
            for j in 0..2 {
                for x in 0..system.n_atoms() {
                    assert_eq!(
                        lhs.value(j, system.forward(x)).to_bits(),
                        rhs.value(j, x).to_bits()
                    );
                }
            }
        }
    }

    #[test]
    fn equimeasurability_identity_system() {
        let system = PermutationSystem::rotation(9, 0).unwrap();
        let op = LineOperatorSpec::one_sided_maximal(3).unwrap();
        let report = check_equimeasurability(&system, &op, &EquimeasurabilityConfig::default())
            .unwrap();
        assert!(report.pass());
    }

    #[test]
    fn equimeasurability_cyclic_system() {
        let system = PermutationSystem::cyclic(16).unwrap();
        let op = LineOperatorSpec::uncentered_maximal(3).unwrap();
        let cfg = EquimeasurabilityConfig {
            n_trials: 50,
            ..Default::default()
        };
        let report = check_equimeasurability(&system, &op, &cfg).unwrap();
        assert!(report.pass(), "{:?}", report.violations.first());
        assert_eq!(report.cases, 50);
    }
}
