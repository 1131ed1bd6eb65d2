//! Core numeric types: exponents, finite weighted atom spaces, vector-valued
//! fields on them, sampled sequences on integer windows, and the associated
//! `l^r` / `L^p` / distribution-function machinery.
//!
//! Conventions fixed here and relied on everywhere else:
//! - all arithmetic is `f64`;
//! - `r = inf` is a first-class exponent, `p` is always finite;
//! - level sets use the strict comparison `g > lambda`;
//! - integer windows carry unit mass per lattice point.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Compensated (Neumaier) summation. Used for every norm and integral
/// accumulation so that the exact identities checked by certificates are
/// not drowned in naive-summation error.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `|x|^p` with exact fast paths for the common exponents.
pub(crate) fn pow_p(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

/// A sequence-space exponent `r` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    /// A finite exponent; rejects `r < 1`, NaN and infinities.
    pub fn finite(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidExponent {
                value: r,
                reason: "finite exponent must be a finite number",
            });
        }
        if r < 1.0 {
            return Err(Error::InvalidExponent {
                value: r,
                reason: "exponent must be at least 1",
            });
        }
        Ok(Exponent::Finite(r))
    }

    pub fn infinity() -> Self {
        Exponent::Infinity
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "INF" | "infinity" | "oo" => Ok(Exponent::Infinity),
            t => {
                let r: f64 = t.parse().map_err(|_| Error::InvalidSpec {
                    input: s.to_string(),
                    reason: "expected a number or `inf`",
                })?;
                Exponent::finite(r)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(r) => serializer.serialize_f64(*r),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v as f64).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v as f64).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExponentVisitor)
    }
}

/// The `(p, r)` pair of a vector-valued inequality: `p` finite in `[1, inf)`,
/// `r` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPair {
    p: f64,
    r: Exponent,
}

impl ExponentPair {
    pub fn new(p: f64, r: Exponent) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidExponent {
                value: p,
                reason: "p must be finite",
            });
        }
        if p < 1.0 {
            return Err(Error::InvalidExponent {
                value: p,
                reason: "p must be at least 1",
            });
        }
        Ok(ExponentPair { p, r })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> Exponent {
        self.r
    }
}

/// A finite atom space with strictly positive weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedSpace {
    weights: Vec<f64>,
}

impl WeightedSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("weight list is empty"));
        }
        if !weights.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(Error::InvalidWeights(
                "every atom weight must be finite and strictly positive",
            ));
        }
        Ok(WeightedSpace { weights })
    }

    /// The uniform probability space on `n` atoms (weights `1/n`).
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroParameter { name: "n_atoms" });
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn n_atoms(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    pub fn total_measure(&self) -> f64 {
        neumaier_sum(self.weights.iter().copied())
    }
}

fn ensure_finite(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidValues("entries must be finite"));
    }
    Ok(())
}

/// Pointwise `l^r` norm across `components` rows of length `n`, at `point`.
fn lr_norm_at(values: &[f64], n: usize, components: usize, point: usize, r: Exponent) -> f64 {
    match r {
        Exponent::Infinity => (0..components)
            .map(|j| values[j * n + point].abs())
            .fold(0.0, f64::max),
        Exponent::Finite(rf) => {
            let mut nonzero = 0usize;
            let mut last = 0.0f64;
            for j in 0..components {
                let a = values[j * n + point].abs();
                if a != 0.0 {
                    nonzero += 1;
                    last = a;
                }
            }
            // A single nonzero entry has norm |entry| for every r.
            match nonzero {
                0 => 0.0,
                1 => last,
                _ => {
                    if rf == 1.0 {
                        let mut s = 0.0;
                        for j in 0..components {
                            s += values[j * n + point].abs();
                        }
                        s
                    } else if rf == 2.0 {
                        let mut s = 0.0;
                        for j in 0..components {
                            let a = values[j * n + point];
                            s += a * a;
                        }
                        s.sqrt()
                    } else {
                        let mut s = 0.0;
                        for j in 0..components {
                            s += values[j * n + point].abs().powf(rf);
                        }
                        s.powf(1.0 / rf)
                    }
                }
            }
        }
    }
}

/// A `J`-component real field on a weighted atom space. Rows are components,
/// columns are atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    space: Arc<WeightedSpace>,
    components: usize,
    values: Vec<f64>,
}

impl VectorField {
    pub fn new(space: Arc<WeightedSpace>, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 {
            return Err(Error::ZeroParameter { name: "components" });
        }
        if values.len() != components * space.n_atoms() {
            return Err(Error::InvalidValues(
                "value array must have components * n_atoms entries",
            ));
        }
        ensure_finite(&values)?;
        Ok(VectorField {
            space,
            components,
            values,
        })
    }

    /// Builds a field from a closure `(component, atom) -> value`.
    pub fn from_fn<F>(space: Arc<WeightedSpace>, components: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64,
    {
        let n = space.n_atoms();
        let mut values = Vec::with_capacity(components * n);
        for j in 0..components {
            for i in 0..n {
                values.push(f(j, i));
            }
        }
        Self::new(space, components, values)
    }

    pub fn zeros(space: Arc<WeightedSpace>, components: usize) -> Result<Self> {
        let n = space.n_atoms();
        Self::new(space, components, vec![0.0; components * n])
    }

    /// The scalar indicator of a single atom.
    pub fn indicator(space: Arc<WeightedSpace>, atom: usize) -> Result<Self> {
        let n = space.n_atoms();
        if atom >= n {
            return Err(Error::AtomOutOfRange {
                atom,
                n_atoms: n,
            });
        }
        let mut values = vec![0.0; n];
        values[atom] = 1.0;
        Self::new(space, 1, values)
    }

    pub fn space(&self) -> &Arc<WeightedSpace> {
        &self.space
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn n_atoms(&self) -> usize {
        self.space.n_atoms()
    }

    pub fn value(&self, component: usize, atom: usize) -> f64 {
        self.values[component * self.n_atoms() + atom]
    }

    pub fn component(&self, component: usize) -> &[f64] {
        let n = self.n_atoms();
        &self.values[component * n..(component + 1) * n]
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            Arc::clone(&self.space),
            self.components,
            self.values.iter().map(|v| c * v).collect(),
        )
    }

    pub fn same_space(&self, other: &VectorField) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || self.space == other.space
    }

    /// Pointwise `l^r` norm across components; one value per atom.
    pub fn lr_norm_pointwise(&self, r: Exponent) -> Vec<f64> {
        let n = self.n_atoms();
        (0..n)
            .map(|i| lr_norm_at(&self.values, n, self.components, i, r))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }
}

/// A `J`-component function on an integer window `[offset, offset + width - 1]`.
/// Rows are components, columns are consecutive lattice points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSequence {
    components: usize,
    offset: i64,
    values: Vec<f64>,
}

impl SampledSequence {
    pub fn new(components: usize, offset: i64, values: Vec<f64>) -> Result<Self> {
        if components == 0 {
            return Err(Error::ZeroParameter { name: "components" });
        }
        if values.is_empty() || values.len() % components != 0 {
            return Err(Error::InvalidValues(
                "value array must be a nonempty multiple of the component count",
            ));
        }
        ensure_finite(&values)?;
        Ok(SampledSequence {
            components,
            offset,
            values,
        })
    }

    pub fn from_fn<F>(components: usize, t_min: i64, t_max: i64, f: F) -> Result<Self>
    where
        F: Fn(usize, i64) -> f64,
    {
        if t_max < t_min {
            return Err(Error::InvalidValues("window is empty"));
        }
        let width = (t_max - t_min + 1) as usize;
        let mut values = Vec::with_capacity(components * width);
        for j in 0..components {
            for t in t_min..=t_max {
                values.push(f(j, t));
            }
        }
        Self::new(components, t_min, values)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn width(&self) -> usize {
        self.values.len() / self.components
    }

    pub fn t_min(&self) -> i64 {
        self.offset
    }

    pub fn t_max(&self) -> i64 {
        self.offset + self.width() as i64 - 1
    }

    pub fn contains(&self, t: i64) -> bool {
        t >= self.t_min() && t <= self.t_max()
    }

    /// Value of component `j` at absolute time `t`. Panics outside the window.
    pub fn value(&self, component: usize, t: i64) -> f64 {
        assert!(self.contains(t), "time {t} outside window");
        let pos = (t - self.offset) as usize;
        self.values[component * self.width() + pos]
    }

    pub fn component(&self, component: usize) -> &[f64] {
        let w = self.width();
        &self.values[component * w..(component + 1) * w]
    }

    /// The same samples translated by `s`: the result represents `t -> f(t - s)`.
    pub fn shifted(&self, s: i64) -> Self {
        SampledSequence {
            components: self.components,
            offset: self.offset + s,
            values: self.values.clone(),
        }
    }

    /// Pointwise `l^r` norm across components; one value per lattice point,
    /// indexed like the window.
    pub fn lr_norm_pointwise(&self, r: Exponent) -> Vec<f64> {
        let w = self.width();
        (0..w)
            .map(|i| lr_norm_at(&self.values, w, self.components, i, r))
            .collect()
    }
}

/// `(sum_i mu_i |g_i|^p)^(1/p)` on a weighted space.
pub fn lp_norm_space(g: &[f64], space: &WeightedSpace, p: f64) -> f64 {
    assert!(p >= 1.0 && p.is_finite(), "p must be finite and >= 1");
    assert_eq!(g.len(), space.n_atoms(), "value/space size mismatch");
    integral_p_space(g, space, p).powf(1.0 / p)
}

/// `sum_i mu_i |g_i|^p` (the p-th power of the norm, kept separate so the
/// certificate identities can be checked without a power round-trip).
pub fn integral_p_space(g: &[f64], space: &WeightedSpace, p: f64) -> f64 {
    neumaier_sum(
        g.iter()
            .zip(space.weights())
            .map(|(v, w)| w * pow_p(*v, p)),
    )
}

/// `(sum_t |g_t|^p)^(1/p)` on an integer window (unit mass per point).
pub fn lp_norm_window(g: &[f64], p: f64) -> f64 {
    assert!(p >= 1.0 && p.is_finite(), "p must be finite and >= 1");
    integral_p_window(g, p).powf(1.0 / p)
}

/// `sum_t |g_t|^p` on an integer window.
pub fn integral_p_window(g: &[f64], p: f64) -> f64 {
    neumaier_sum(g.iter().map(|v| pow_p(*v, p)))
}

/// Measure of the strict level set `{ i : g_i > lambda }`.
pub fn distribution_measure_space(g: &[f64], lambda: f64, space: &WeightedSpace) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    assert_eq!(g.len(), space.n_atoms(), "value/space size mismatch");
    Ok(neumaier_sum(
        g.iter()
            .zip(space.weights())
            .filter(|(v, _)| **v > lambda)
            .map(|(_, w)| *w),
    ))
}

/// Counting measure of `{ t : g_t > lambda }` on an integer window.
pub fn distribution_measure_window(g: &[f64], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    Ok(g.iter().filter(|v| **v > lambda).count() as f64)
}

/// The smallest constant `C` for which the weak inequality
/// `mu{ ||output||_r > lambda } <= (C/lambda)^p * integral ||input||_r^p`
/// holds at this `lambda`:
/// `[ lambda^p * mu{ ||output||_r > lambda } / integral ||input||_r^p ]^(1/p)`.
pub fn weak_ratio(
    output: &VectorField,
    input: &VectorField,
    pr: &ExponentPair,
    lambda: f64,
) -> Result<f64> {
    if !output.same_space(input) {
        return Err(Error::SpaceMismatch(
            "weak_ratio requires fields on the same space",
        ));
    }
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let p = pr.p();
    let denom = integral_p_space(&input.lr_norm_pointwise(pr.r()), input.space(), p);
    if denom == 0.0 {
        return Err(Error::DegenerateInput("input field is identically zero"));
    }
    let level = distribution_measure_space(&output.lr_norm_pointwise(pr.r()), lambda, output.space())?;
    Ok((pow_p(lambda, p) * level / denom).powf(1.0 / p))
}
