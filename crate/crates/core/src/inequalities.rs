//! Empirical constants and per-trial proof certificates for the strong and
//! weak vector-valued maximal inequalities, plus the line-versus-system
//! transfer comparison.
//!
//! Empirical constants are suprema of per-trial ratios over seeded ensembles;
//! they are lower bounds on the true operator norms and every report labels
//! them as empirical. Certificates replay the transfer argument on one
//! concrete trial in discrete form: the continuous interval lengths `2a` and
//! `2(a+eps)` become the lattice counts `2a+1` and `2(a+eps)+1`, which turns
//! the averaging step into an exact identity. Truncation keeps samples with
//! `|t| <= a + eps`, so semilocality wipes the discarded tail on the whole
//! window `|t| <= a`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::PermutationSystem;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::function_spaces::{
    distribution_measure_space, integral_p_window, lp_norm_space, lp_norm_window, neumaier_sum,
    pow_p, weak_ratio, Exponent, ExponentPair, SampledSequence, VectorField, WeightedSpace,
};
use crate::line_operators::LineOperatorSpec;
use crate::seeding::trial_seed;
use crate::transfer::{truncate_trace, TransferredOperator};

/// Absolute tolerance for every certificate link.
pub const LINK_TOLERANCE: f64 = 1e-9;

/// Which side of the maximal inequality a constant estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityKind {
    Strong,
    Weak,
}

impl std::fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InequalityKind::Strong => write!(f, "strong"),
            InequalityKind::Weak => write!(f, "weak"),
        }
    }
}

impl std::str::FromStr for InequalityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(InequalityKind::Strong),
            "weak" => Ok(InequalityKind::Weak),
            _ => Err(Error::InvalidSpec {
                input: s.to_string(),
                reason: "expected `strong` or `weak`",
            }),
        }
    }
}

/// Value distribution for ensemble trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueDistribution {
    /// Uniform on `[-1, 1]`.
    Uniform,
    /// Each entry is zero with probability 0.9, otherwise uniform on `[0, 1)`.
    SparseNonneg,
}

impl std::fmt::Display for ValueDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValueDistribution::Uniform => write!(f, "uniform"),
            ValueDistribution::SparseNonneg => write!(f, "sparse"),
        }
    }
}

impl std::str::FromStr for ValueDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(ValueDistribution::Uniform),
            "sparse" => Ok(ValueDistribution::SparseNonneg),
            _ => Err(Error::InvalidSpec {
                input: s.to_string(),
                reason: "expected `uniform` or `sparse`",
            }),
        }
    }
}

/// A seeded trial ensemble: how many fields to draw, from which distribution,
/// with how many components.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSpec {
    pub n_trials: u64,
    pub master_seed: u64,
    pub components: usize,
    pub distribution: ValueDistribution,
}

impl EnsembleSpec {
    pub fn new(n_trials: u64, master_seed: u64, components: usize) -> Self {
        EnsembleSpec {
            n_trials,
            master_seed,
            components,
            distribution: ValueDistribution::Uniform,
        }
    }
}

fn sample_value(rng: &mut ChaCha8Rng, distribution: ValueDistribution) -> f64 {
    match distribution {
        ValueDistribution::Uniform => rng.random_range(-1.0..1.0),
        ValueDistribution::SparseNonneg => {
            if rng.random_bool(0.1) {
                rng.random_range(0.0..1.0)
            } else {
                0.0
            }
        }
    }
}

/// The field for trial `index` of an ensemble. Entirely determined by
/// `(spec.master_seed, index)`, independent of evaluation order.
pub fn generate_field(
    space: &Arc<WeightedSpace>,
    spec: &EnsembleSpec,
    index: u64,
) -> Result<VectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.master_seed, index));
    let values = (0..spec.components * space.n_atoms())
        .map(|_| sample_value(&mut rng, spec.distribution))
        .collect();
    VectorField::new(Arc::clone(space), spec.components, values)
}

/// The line-side sequence for trial `index`: values on `[0, support_width)`,
/// zero padding on both sides wide enough that the operator output is fully
/// captured by the shrunken window.
pub fn generate_sequence(
    op: &LineOperatorSpec,
    spec: &EnsembleSpec,
    support_width: usize,
    index: u64,
) -> Result<SampledSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.master_seed, index));
    let pad = op.semilocal_radius() + op.length_param() + 1;
    let width = support_width + 2 * pad;
    let mut values = vec![0.0; spec.components * width];
    for comp in 0..spec.components {
        for k in 0..support_width {
            values[comp * width + pad + k] = sample_value(&mut rng, spec.distribution);
        }
    }
    SampledSequence::new(spec.components, -(pad as i64), values)
}

/// A logarithmic grid of levels, expressed as factors of a per-trial scale
/// (the maximum pointwise `l^r` norm of the operator output).
#[derive(Debug, Clone, Serialize)]
pub struct LambdaGrid {
    pub min_factor: f64,
    pub max_factor: f64,
    pub points: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid {
            min_factor: 0.01,
            max_factor: 1.0,
            points: 32,
        }
    }
}

impl LambdaGrid {
    pub fn new(min_factor: f64, max_factor: f64, points: usize) -> Result<Self> {
        if !(min_factor > 0.0 && max_factor.is_finite() && max_factor >= min_factor) {
            return Err(Error::InvalidValues(
                "lambda grid requires 0 < min_factor <= max_factor < inf",
            ));
        }
        Ok(LambdaGrid {
            min_factor,
            max_factor,
            points,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    /// Materializes the grid against a concrete scale. Empty when the scale
    /// is zero (an identically zero output has nothing to probe).
    pub fn levels(&self, scale: f64) -> Vec<f64> {
        if self.points == 0 || !(scale > 0.0) {
            return Vec::new();
        }
        if self.points == 1 {
            return vec![scale * self.max_factor];
        }
        let lo = (scale * self.min_factor).ln();
        let hi = (scale * self.max_factor).ln();
        (0..self.points)
            .map(|i| (lo + (hi - lo) * i as f64 / (self.points - 1) as f64).exp())
            .collect()
    }
}

/// `|| ||output||_r ||_p / || ||input||_r ||_p` on the shared space.
pub fn strong_ratio(output: &VectorField, input: &VectorField, pr: &ExponentPair) -> Result<f64> {
    if !output.same_space(input) {
        return Err(Error::SpaceMismatch(
            "strong_ratio requires fields on the same space",
        ));
    }
    let p = pr.p();
    let denom = lp_norm_space(&input.lr_norm_pointwise(pr.r()), input.space(), p);
    if denom == 0.0 {
        return Err(Error::DegenerateInput("input field is identically zero"));
    }
    let numer = lp_norm_space(&output.lr_norm_pointwise(pr.r()), output.space(), p);
    Ok(numer / denom)
}

/// An empirical strong or weak constant: the supremum of per-trial ratios
/// over a seeded ensemble. A lower bound on the true operator norm; nothing
/// here claims sharpness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub kind: InequalityKind,
    pub estimate: &'static str,
    pub p: f64,
    pub r: Exponent,
    pub value: f64,
    pub n_trials: u64,
    pub ensemble_seed: u64,
    pub components: usize,
    pub operator: String,
    pub space: String,
    pub degenerate_trials: u64,
}

fn max_finite(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Empirical constant of a transferred operator over a seeded field ensemble.
pub fn estimate_transfer_constant(
    top: &TransferredOperator,
    ensemble: &EnsembleSpec,
    pr: &ExponentPair,
    kind: InequalityKind,
    grid: &LambdaGrid,
) -> Result<ConstantEstimate> {
    if kind == InequalityKind::Weak && grid.is_empty() {
        return Err(Error::EmptyLambdaGrid);
    }
    let space = top.system().space();
    let per_trial: Vec<Result<Option<f64>>> = map_indexed(ensemble.n_trials as usize, |i| {
        let field = generate_field(space, ensemble, i as u64)?;
        if field.is_zero() {
            return Ok(None);
        }
        let output = top.apply(&field)?;
        match kind {
            InequalityKind::Strong => Ok(Some(strong_ratio(&output, &field, pr)?)),
            InequalityKind::Weak => {
                let scale = max_finite(output.lr_norm_pointwise(pr.r()));
                let levels = grid.levels(scale);
                if levels.is_empty() {
                    return Ok(None);
                }
                let mut best = 0.0f64;
                for lambda in levels {
                    best = best.max(weak_ratio(&output, &field, pr, lambda)?);
                }
                Ok(Some(best))
            }
        }
    });
    let mut value = 0.0f64;
    let mut degenerate = 0u64;
    for r in per_trial {
        match r? {
            Some(v) => value = value.max(v),
            None => degenerate += 1,
        }
    }
    Ok(ConstantEstimate {
        kind,
        estimate: "empirical",
        p: pr.p(),
        r: pr.r(),
        value,
        n_trials: ensemble.n_trials,
        ensemble_seed: ensemble.master_seed,
        components: ensemble.components,
        operator: format!("transfer({})", top.line_op()),
        space: format!("atoms:{}", top.system().n_atoms()),
        degenerate_trials: degenerate,
    })
}

/// Empirical constant of a line operator over a seeded sequence ensemble
/// (lattice norms, unit mass per point).
pub fn estimate_line_constant(
    op: &LineOperatorSpec,
    ensemble: &EnsembleSpec,
    support_width: usize,
    pr: &ExponentPair,
    kind: InequalityKind,
    grid: &LambdaGrid,
) -> Result<ConstantEstimate> {
    if kind == InequalityKind::Weak && grid.is_empty() {
        return Err(Error::EmptyLambdaGrid);
    }
    if support_width == 0 {
        return Err(Error::ZeroParameter {
            name: "support_width",
        });
    }
    let p = pr.p();
    let per_trial: Vec<Result<Option<f64>>> = map_indexed(ensemble.n_trials as usize, |i| {
        let seq = generate_sequence(op, ensemble, support_width, i as u64)?;
        let denom_pow = integral_p_window(&seq.lr_norm_pointwise(pr.r()), p);
        if denom_pow == 0.0 {
            return Ok(None);
        }
        let out = op.apply(&seq)?;
        let out_norms = out.lr_norm_pointwise(pr.r());
        match kind {
            InequalityKind::Strong => {
                Ok(Some(lp_norm_window(&out_norms, p) / denom_pow.powf(1.0 / p)))
            }
            InequalityKind::Weak => {
                let scale = max_finite(out_norms.iter().copied());
                let levels = grid.levels(scale);
                if levels.is_empty() {
                    return Ok(None);
                }
                let mut best = 0.0f64;
                for lambda in levels {
                    let count = out_norms.iter().filter(|v| **v > lambda).count() as f64;
                    best = best.max((pow_p(lambda, p) * count / denom_pow).powf(1.0 / p));
                }
                Ok(Some(best))
            }
        }
    });
    let mut value = 0.0f64;
    let mut degenerate = 0u64;
    for r in per_trial {
        match r? {
            Some(v) => value = value.max(v),
            None => degenerate += 1,
        }
    }
    Ok(ConstantEstimate {
        kind,
        estimate: "empirical",
        p: pr.p(),
        r: pr.r(),
        value,
        n_trials: ensemble.n_trials,
        ensemble_seed: ensemble.master_seed,
        components: ensemble.components,
        operator: op.to_string(),
        space: format!("line:support={support_width}"),
        degenerate_trials: degenerate,
    })
}

/// One inequality link of a certificate.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateLink {
    pub name: &'static str,
    /// `identity` links check `|lhs - rhs| <= tol`, `bound` links `lhs <= rhs + tol`.
    pub relation: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl CertificateLink {
    fn identity(name: &'static str, lhs: f64, rhs: f64) -> Self {
        CertificateLink {
            name,
            relation: "identity",
            lhs,
            rhs,
            pass: (lhs - rhs).abs() <= LINK_TOLERANCE,
        }
    }

    fn bound(name: &'static str, lhs: f64, rhs: f64) -> Self {
        CertificateLink {
            name,
            relation: "bound",
            lhs,
            rhs,
            pass: lhs <= rhs + LINK_TOLERANCE,
        }
    }

    /// A bound checked over a family; `lhs`/`rhs` report the binding member.
    fn family_bound(name: &'static str, worst_lhs: f64, worst_rhs: f64, pass: bool) -> Self {
        CertificateLink {
            name,
            relation: "bound",
            lhs: worst_lhs,
            rhs: worst_rhs,
            pass,
        }
    }
}

/// Per-trial certificate: the discrete transfer argument replayed on one
/// field, link by link.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub kind: InequalityKind,
    pub trial: Option<u64>,
    pub seed: Option<u64>,
    pub p: f64,
    pub r: Exponent,
    pub a: usize,
    pub epsilon: usize,
    pub lambda: Option<f64>,
    /// `(2(a+eps)+1) / (2a+1)`, the lattice-count surplus of the truncation.
    pub slack_factor: f64,
    /// The line constant measured on this trial's truncated traces.
    pub line_constant: f64,
    pub trivial: bool,
    pub links: Vec<CertificateLink>,
    pub pass: bool,
}

/// Everything the certificate links need, computed once per trial:
/// per-atom transferred values on `|t| <= a`, their truncated counterparts
/// on the full output window, and the truncated-input integrals.
struct CertificateTraces {
    a: usize,
    eps: usize,
    p: f64,
    slack_factor: f64,
    space: Arc<WeightedSpace>,
    /// `||G(t,x)||_r` for `t in [-a, a]`; indexed `[atom][a + t]`.
    g_norms: Vec<Vec<f64>>,
    /// `||G^(a+eps)(t,x)||_r` on the full output window; `[atom][t - gb_t_min]`.
    gb_norms: Vec<Vec<f64>>,
    gb_t_min: i64,
    /// `sum_t ||F^(a+eps)(t,x)||_r^p` per atom.
    fb_integrals: Vec<f64>,
    /// `||f(x)||_r` per atom.
    f_norms: Vec<f64>,
}

impl CertificateTraces {
    fn compute(
        line_op: &LineOperatorSpec,
        system: &PermutationSystem,
        field: &VectorField,
        pr: &ExponentPair,
        a: usize,
    ) -> Result<Self> {
        if a == 0 {
            return Err(Error::ZeroParameter { name: "a" });
        }
        let eps = line_op.semilocal_radius();
        let p = pr.p();
        let r = pr.r();
        let w = (a + 2 * eps + line_op.length_param() + 1) as i64;
        let gb_t_min = -w + line_op.backward_reach() as i64;

        let rows: Vec<Result<(Vec<f64>, Vec<f64>, f64)>> =
            map_indexed(system.n_atoms(), |atom| {
                let trace = system.orbit_trace(field, atom, -w, w)?;
                let g = line_op.apply(&trace)?;
                let truncated = truncate_trace(&trace, a + eps + 1)?;
                let gb = line_op.apply(&truncated)?;
                debug_assert_eq!(gb.t_min(), gb_t_min);

                let g_row: Vec<f64> = {
                    let norms = g.lr_norm_pointwise(r);
                    let base = (-(a as i64) - g.t_min()) as usize;
                    norms[base..base + 2 * a + 1].to_vec()
                };
                let gb_row = gb.lr_norm_pointwise(r);
                let fb_int = integral_p_window(&truncated.lr_norm_pointwise(r), p);
                Ok((g_row, gb_row, fb_int))
            });

        let n = system.n_atoms();
        let mut g_norms = Vec::with_capacity(n);
        let mut gb_norms = Vec::with_capacity(n);
        let mut fb_integrals = Vec::with_capacity(n);
        for row in rows {
            let (g_row, gb_row, fb_int) = row?;
            g_norms.push(g_row);
            gb_norms.push(gb_row);
            fb_integrals.push(fb_int);
        }
        let slack_factor = (2 * (a + eps) + 1) as f64 / (2 * a + 1) as f64;
        Ok(CertificateTraces {
            a,
            eps,
            p,
            slack_factor,
            space: Arc::clone(system.space()),
            g_norms,
            gb_norms,
            gb_t_min,
            fb_integrals,
            f_norms: field.lr_norm_pointwise(r),
        })
    }

    fn n_atoms(&self) -> usize {
        self.g_norms.len()
    }

    /// `||G^(a+eps)(t,x)||_r` at absolute time `t`.
    fn gb_at(&self, atom: usize, t: i64) -> f64 {
        self.gb_norms[atom][(t - self.gb_t_min) as usize]
    }

    /// Weighted integral of `||G(t, .)||^p` at window index `idx` (`t = idx - a`).
    fn g_integral_at(&self, idx: usize) -> f64 {
        neumaier_sum(
            (0..self.n_atoms())
                .map(|x| self.space.weight(x) * pow_p(self.g_norms[x][idx], self.p)),
        )
    }

    /// Weighted integral of `||G^(a+eps)(t, .)||^p` at absolute time `t`.
    fn gb_integral_at(&self, t: i64) -> f64 {
        neumaier_sum(
            (0..self.n_atoms()).map(|x| self.space.weight(x) * pow_p(self.gb_at(x, t), self.p)),
        )
    }

    /// `integral ||f||_r^p dmu`.
    fn input_integral(&self) -> f64 {
        neumaier_sum(
            (0..self.n_atoms()).map(|x| self.space.weight(x) * pow_p(self.f_norms[x], self.p)),
        )
    }

    /// Strong line constant on the truncated traces, as its p-th power:
    /// `max_x sum_t ||G^b(t,x)||^p / sum_t ||F^b(t,x)||^p`.
    fn line_constant_pow(&self) -> f64 {
        let mut best = 0.0f64;
        for x in 0..self.n_atoms() {
            if self.fb_integrals[x] > 0.0 {
                let out = integral_p_window(&self.gb_norms[x], self.p);
                best = best.max(out / self.fb_integrals[x]);
            }
        }
        best
    }

    /// Weak line constant at `lambda` on the truncated traces, as its p-th
    /// power: `max_x lambda^p * #{t : ||G^b(t,x)|| > lambda} / sum_t ||F^b||^p`.
    fn weak_line_constant_pow(&self, lambda: f64) -> f64 {
        let lp = pow_p(lambda, self.p);
        let mut best = 0.0f64;
        for x in 0..self.n_atoms() {
            if self.fb_integrals[x] > 0.0 {
                let count = self.gb_norms[x].iter().filter(|v| **v > lambda).count() as f64;
                best = best.max(lp * count / self.fb_integrals[x]);
            }
        }
        best
    }
}

/// Certificate for the strong branch of the transfer argument:
///
/// 1. `sum_{|t|<=a} integral ||G(t,.)||^p = (2a+1) * integral ||G(0,.)||^p`
///    (exact, by equimeasurability);
/// 2. `integral ||G(t,.)||^p <= integral ||G^(a+eps)(t,.)||^p` for `|t| <= a`
///    (domination after truncation);
/// 3. per atom, `sum_{|t|<=a} ||G^(a+eps)(t,x)||^p <= C^p * sum_t ||F^(a+eps)(t,x)||^p`
///    with `C` the line constant measured on the truncated traces;
/// 4. `integral ||G(0,.)||^p <= slack * C^p * integral ||f||^p`.
pub fn strong_certificate(
    line_op: &LineOperatorSpec,
    system: &PermutationSystem,
    field: &VectorField,
    pr: &ExponentPair,
    a: usize,
) -> Result<CertificateReport> {
    let tr = CertificateTraces::compute(line_op, system, field, pr, a)?;
    let width = 2 * a + 1;

    let per_t_g: Vec<f64> = (0..width).map(|idx| tr.g_integral_at(idx)).collect();
    let lhs_avg = neumaier_sum(per_t_g.iter().copied());
    let g0_integral = per_t_g[a];
    let averaging =
        CertificateLink::identity("averaging_identity", lhs_avg, width as f64 * g0_integral);

    // domination, reported at the worst t
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut domination_pass = true;
    for (idx, &lhs) in per_t_g.iter().enumerate() {
        let t = idx as i64 - a as i64;
        let rhs = tr.gb_integral_at(t);
        if lhs > rhs + LINK_TOLERANCE {
            domination_pass = false;
        }
        if lhs - rhs > worst.0 {
            worst = (lhs - rhs, lhs, rhs);
        }
    }
    let domination =
        CertificateLink::family_bound("domination", worst.1, worst.2, domination_pass);

    // per-atom line bound with the measured constant
    let c_pow = tr.line_constant_pow();
    let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut line_pass = true;
    for x in 0..tr.n_atoms() {
        let lhs = neumaier_sum((-(a as i64)..=a as i64).map(|t| pow_p(tr.gb_at(x, t), tr.p)));
        let rhs = c_pow * tr.fb_integrals[x];
        if lhs > rhs + LINK_TOLERANCE {
            line_pass = false;
        }
        if lhs - rhs > worst.0 {
            worst = (lhs - rhs, lhs, rhs);
        }
    }
    let line_bound =
        CertificateLink::family_bound("per_atom_line_bound", worst.1, worst.2, line_pass);

    let final_bound = CertificateLink::bound(
        "final_bound",
        g0_integral,
        tr.slack_factor * c_pow * tr.input_integral(),
    );

    let links = vec![averaging, domination, line_bound, final_bound];
    let pass = links.iter().all(|l| l.pass);
    Ok(CertificateReport {
        kind: InequalityKind::Strong,
        trial: None,
        seed: None,
        p: pr.p(),
        r: pr.r(),
        a,
        epsilon: tr.eps,
        lambda: None,
        slack_factor: tr.slack_factor,
        line_constant: c_pow.powf(1.0 / tr.p),
        trivial: false,
        links,
        pass,
    })
}

/// Certificates for the weak branch at several levels, sharing one trace
/// computation. Links per level `lambda`:
///
/// 1. `(2a+1) * mu(E) <= sum_x mu_x * |E~_x|` with
///    `E = {x : ||G(0,x)|| > lambda}` and
///    `E~_x = {|t| <= a : ||G^(a+eps)(t,x)|| > lambda}`;
/// 2. per atom, `|E~_x| <= (C2^p / lambda^p) * sum_t ||F^(a+eps)(t,x)||^p`
///    with `C2` the weak line constant measured on the truncated traces;
/// 3. `mu(E) <= slack * (C2^p / lambda^p) * integral ||f||^p`.
pub fn weak_certificates(
    line_op: &LineOperatorSpec,
    system: &PermutationSystem,
    field: &VectorField,
    pr: &ExponentPair,
    lambdas: &[f64],
    a: usize,
) -> Result<Vec<CertificateReport>> {
    if lambdas.is_empty() {
        return Err(Error::EmptyLambdaGrid);
    }
    let tr = CertificateTraces::compute(line_op, system, field, pr, a)?;
    let g0_norms: Vec<f64> = (0..tr.n_atoms()).map(|x| tr.g_norms[x][a]).collect();
    let input_integral = tr.input_integral();
    let width_f = (2 * a + 1) as f64;

    lambdas
        .iter()
        .map(|&lambda| {
            if !(lambda > 0.0) {
                return Err(Error::NonPositiveLambda(lambda));
            }
            let e_measure = distribution_measure_space(&g0_norms, lambda, &tr.space)?;
            let etilde: Vec<f64> = (0..tr.n_atoms())
                .map(|x| {
                    (-(tr.a as i64)..=tr.a as i64)
                        .filter(|&t| tr.gb_at(x, t) > lambda)
                        .count() as f64
                })
                .collect();
            let etilde_integral =
                neumaier_sum((0..tr.n_atoms()).map(|x| tr.space.weight(x) * etilde[x]));
            let counting =
                CertificateLink::bound("counting_bound", width_f * e_measure, etilde_integral);

            let c2_pow = tr.weak_line_constant_pow(lambda);
            let lambda_pow = pow_p(lambda, tr.p);
            let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
            let mut atom_pass = true;
            for x in 0..tr.n_atoms() {
                let lhs = etilde[x];
                let rhs = c2_pow / lambda_pow * tr.fb_integrals[x];
                if lhs > rhs + LINK_TOLERANCE {
                    atom_pass = false;
                }
                if lhs - rhs > worst.0 {
                    worst = (lhs - rhs, lhs, rhs);
                }
            }
            let atom_bound =
                CertificateLink::family_bound("per_atom_weak_bound", worst.1, worst.2, atom_pass);

            let final_bound = CertificateLink::bound(
                "final_bound",
                e_measure,
                tr.slack_factor * c2_pow / lambda_pow * input_integral,
            );

            let trivial = e_measure == 0.0 && etilde_integral == 0.0;
            let links = vec![counting, atom_bound, final_bound];
            let pass = links.iter().all(|l| l.pass);
            Ok(CertificateReport {
                kind: InequalityKind::Weak,
                trial: None,
                seed: None,
                p: pr.p(),
                r: pr.r(),
                a,
                epsilon: tr.eps,
                lambda: Some(lambda),
                slack_factor: tr.slack_factor,
                line_constant: c2_pow.powf(1.0 / tr.p),
                trivial,
                links,
                pass,
            })
        })
        .collect()
}

/// Single-level convenience wrapper over [`weak_certificates`].
pub fn weak_certificate(
    line_op: &LineOperatorSpec,
    system: &PermutationSystem,
    field: &VectorField,
    pr: &ExponentPair,
    lambda: f64,
    a: usize,
) -> Result<CertificateReport> {
    Ok(weak_certificates(line_op, system, field, pr, &[lambda], a)?
        .into_iter()
        .next()
        .expect("one lambda in, one report out"))
}

/// Per-trial line-versus-system comparison.
#[derive(Debug, Clone, Serialize)]
pub struct TrialComparison {
    pub trial: u64,
    pub seed: u64,
    pub strong_line: f64,
    pub strong_sys: f64,
    pub weak_line: f64,
    pub weak_sys: f64,
    /// `[(2(a+eps)+1)/(2a+1)]^(1/p)`, the ratio-level slack.
    pub slack: f64,
    pub pass: bool,
}

/// Summary constants of a comparison run (all empirical maxima over trials).
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonSummary {
    pub c_line_strong: f64,
    pub c_sys_strong: f64,
    pub c_line_weak: f64,
    pub c_sys_weak: f64,
    pub violations: u64,
}

/// Report of [`transfer_comparison`].
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub operator: String,
    pub system: String,
    pub p: f64,
    pub r: Exponent,
    pub components: usize,
    pub a: usize,
    pub n_trials: u64,
    pub degenerate_trials: u64,
    pub trials: Vec<TrialComparison>,
    pub summary: ComparisonSummary,
}

impl ComparisonReport {
    pub fn pass(&self) -> bool {
        self.summary.violations == 0
    }
}

/// Runs the transfer comparison: per trial, the system-side strong and weak
/// ratios must not exceed the line-side ratios measured on the same trial's
/// truncated orbit traces, times the truncation slack.
pub fn transfer_comparison(
    line_op: &LineOperatorSpec,
    system: &Arc<PermutationSystem>,
    ensemble: &EnsembleSpec,
    pr: &ExponentPair,
    a: usize,
    grid: &LambdaGrid,
) -> Result<ComparisonReport> {
    if grid.is_empty() {
        return Err(Error::EmptyLambdaGrid);
    }
    let top = TransferredOperator::new(*line_op, Arc::clone(system));
    let p = pr.p();

    let per_trial: Vec<Result<Option<TrialComparison>>> =
        map_indexed(ensemble.n_trials as usize, |i| {
            let trial = i as u64;
            let seed = trial_seed(ensemble.master_seed, trial);
            let field = generate_field(system.space(), ensemble, trial)?;
            if field.is_zero() {
                return Ok(None);
            }
            let output = top.apply(&field)?;
            let strong_sys = strong_ratio(&output, &field, pr)?;
            let levels = grid.levels(max_finite(output.lr_norm_pointwise(pr.r())));
            let mut weak_sys = 0.0f64;
            for &lambda in &levels {
                weak_sys = weak_sys.max(weak_ratio(&output, &field, pr, lambda)?);
            }

            let tr = CertificateTraces::compute(line_op, system, &field, pr, a)?;
            let strong_line = tr.line_constant_pow().powf(1.0 / p);
            let mut weak_line_pow = 0.0f64;
            for &lambda in &levels {
                weak_line_pow = weak_line_pow.max(tr.weak_line_constant_pow(lambda));
            }
            let weak_line = weak_line_pow.powf(1.0 / p);
            let slack = tr.slack_factor.powf(1.0 / p);

            let pass = strong_sys <= slack * strong_line + LINK_TOLERANCE
                && weak_sys <= slack * weak_line + LINK_TOLERANCE;
            Ok(Some(TrialComparison {
                trial,
                seed,
                strong_line,
                strong_sys,
                weak_line,
                weak_sys,
                slack,
                pass,
            }))
        });

    let mut trials = Vec::with_capacity(ensemble.n_trials as usize);
    let mut degenerate = 0u64;
    for r in per_trial {
        match r? {
            Some(t) => trials.push(t),
            None => degenerate += 1,
        }
    }
    let summary = ComparisonSummary {
        c_line_strong: max_finite(trials.iter().map(|t| t.strong_line)),
        c_sys_strong: max_finite(trials.iter().map(|t| t.strong_sys)),
        c_line_weak: max_finite(trials.iter().map(|t| t.weak_line)),
        c_sys_weak: max_finite(trials.iter().map(|t| t.weak_sys)),
        violations: trials.iter().filter(|t| !t.pass).count() as u64,
    };
    Ok(ComparisonReport {
        operator: line_op.to_string(),
        system: format!("atoms:{}", system.n_atoms()),
        p: pr.p(),
        r: pr.r(),
        components: ensemble.components,
        a,
        n_trials: ensemble.n_trials,
        degenerate_trials: degenerate,
        trials,
        summary,
    })
}
