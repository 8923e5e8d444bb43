//! Threshold laws: coupling terms, deviations, limiting probabilities.
//!
//! Every supported (family, property) pair is governed by a scaling of the form
//!
//! ```text
//! coupling = (ln n + c * ln ln n + deviation) / n
//! ```
//!
//! where the coupling plays the role of an effective edge probability
//! (`K^2/P`, `t^2 P`, `(K^2/P)^s / s!`, `q`, ...) and `c` is `k - 1` for
//! minimum degree, k-connectivity and k-robustness, `0` for perfect matchings
//! and `1` for Hamilton cycles. The limiting probability is then
//! `exp(-exp(-deviation) / (k-1)!)` for k-connectivity and minimum degree,
//! `exp(-exp(-deviation))` for matchings and Hamilton cycles, and a bare
//! zero-one law for k-robustness. Compositions with geometric graphs follow
//! a zero-one law in a constant `a` (torus) or `b` (square) instead.
//!
//! Side conditions of the form `P = Omega(n)` cannot be checked at finite `n`;
//! [`side_conditions`] renders each as a ratio against a proxy threshold:
//!
//! | asymptotic form | proxy        |
//! |-----------------|--------------|
//! | `x = Omega(f)`  | `x/f >= 1`   |
//! | `x = omega(f)`  | `x/f >= 10`  |
//! | `x = O(f)`      | `x/f <= 1`   |
//! | `x = o(f)`      | `x/f <= 0.1` |
//! | `P = Omega(n^c)`, `c > c0` | `ln P / ln n > c0` |
//!
//! The flags are advisory and never stop an experiment.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::function::beta::beta_reg;
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};
use crate::models::{
    BinomialRigParams, ErParams, ModelSpec, Region, RggParams, UniformRigParams,
};
use crate::properties::PropertyKind;

/// Model families with a threshold law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelFamily {
    UniformRig { s: u32 },
    BinomialRig { s: u32 },
    Er,
    /// `G_s(n, K, P)` intersected with `G(n, q)`.
    UniformRigEr { s: u32 },
    /// `G_1(n, K, P)` intersected with a geometric graph.
    UniformRigRgg { region: Region },
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelFamily::UniformRig { s } => write!(f, "G_{s}(n,K,P)"),
            ModelFamily::BinomialRig { s } => write!(f, "H_{s}(n,t,P)"),
            ModelFamily::Er => write!(f, "G_ER(n,q)"),
            ModelFamily::UniformRigEr { s } => write!(f, "G_{s}(n,K,P) ∩ G_ER(n,q)"),
            ModelFamily::UniformRigRgg { region } => {
                let r = if *region == Region::Torus { "torus" } else { "square" };
                write!(f, "G_1(n,K,P) ∩ G_RGG(n,r,{r})")
            }
        }
    }
}

impl ModelFamily {
    /// Identifies the family a concrete model belongs to.
    pub fn of(spec: &ModelSpec) -> Result<ModelFamily> {
        match spec {
            ModelSpec::UniformRig(p) => Ok(ModelFamily::UniformRig { s: p.s }),
            ModelSpec::BinomialRig(p) => Ok(ModelFamily::BinomialRig { s: p.s }),
            ModelSpec::Er(_) => Ok(ModelFamily::Er),
            ModelSpec::Intersection(parts) => match parts.as_slice() {
                [ModelSpec::UniformRig(u), ModelSpec::Er(_)] | [ModelSpec::Er(_), ModelSpec::UniformRig(u)] => {
                    Ok(ModelFamily::UniformRigEr { s: u.s })
                }
                [ModelSpec::UniformRig(u), ModelSpec::Rgg(g)] | [ModelSpec::Rgg(g), ModelSpec::UniformRig(u)]
                    if u.s == 1 =>
                {
                    Ok(ModelFamily::UniformRigRgg { region: g.region })
                }
                _ => Err(Error::Unsupported("no threshold law for this composition".into())),
            },
            ModelSpec::Rgg(_) => Err(Error::Unsupported(
                "no threshold law for a bare geometric graph".into(),
            )),
        }
    }

    fn s(&self) -> u32 {
        match *self {
            ModelFamily::UniformRig { s } | ModelFamily::BinomialRig { s } | ModelFamily::UniformRigEr { s } => s,
            _ => 1,
        }
    }
}

/// Shape of the limiting probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum LimitForm {
    /// `exp(-exp(-x) / (k-1)!)`.
    PoissonKConn { k: usize },
    /// `exp(-exp(-x))`.
    Gumbel,
    /// 0 below, 1 above; nothing stated for finite deviations.
    ZeroOneOnly,
    /// 0 for `a < 1`, 1 for `a > 1`.
    RggTorus,
    /// 0 for `b < 1`, 1 for `b > 1`.
    RggSquare,
    /// No law for this (family, property) pair.
    None,
}

/// Whether a prediction is backed by a stated law or is only an audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Law,
    Audit,
}

/// A (family, property) pair with its scaling offset and limit form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub family: ModelFamily,
    pub property: PropertyKind,
    /// Coefficient of `ln ln n` in the scaling.
    pub lnln_coefficient: f64,
    pub limit: LimitForm,
    pub claim: Claim,
}

impl ThresholdSpec {
    pub fn new(family: ModelFamily, property: PropertyKind) -> Result<Self> {
        property.validate()?;
        let lnln_coefficient = match property {
            PropertyKind::MinDegreeAtLeast { k } | PropertyKind::KConnected { k } | PropertyKind::KRobust { k } => {
                (k - 1) as f64
            }
            PropertyKind::NearPerfectMatching => 0.0,
            PropertyKind::HamiltonCycle => 1.0,
        };
        let poisson = |k| LimitForm::PoissonKConn { k };
        let (limit, claim) = match (family, property) {
            (ModelFamily::UniformRig { .. } | ModelFamily::BinomialRig { .. } | ModelFamily::Er, p) => match p {
                PropertyKind::MinDegreeAtLeast { k } | PropertyKind::KConnected { k } => (poisson(k), Claim::Law),
                PropertyKind::NearPerfectMatching | PropertyKind::HamiltonCycle => (LimitForm::Gumbel, Claim::Law),
                PropertyKind::KRobust { .. } => (LimitForm::ZeroOneOnly, Claim::Law),
            },
            (ModelFamily::UniformRigEr { s }, p) => match p {
                PropertyKind::MinDegreeAtLeast { k } => (poisson(k), Claim::Law),
                PropertyKind::KConnected { k } if s == 1 => (poisson(k), Claim::Law),
                // only the minimum-degree law is stated for s >= 2
                PropertyKind::KConnected { k } => (poisson(k), Claim::Audit),
                _ => (LimitForm::None, Claim::Audit),
            },
            (ModelFamily::UniformRigRgg { region }, PropertyKind::KConnected { k: 1 }) => {
                let form = if region == Region::Torus { LimitForm::RggTorus } else { LimitForm::RggSquare };
                (form, Claim::Law)
            }
            (ModelFamily::UniformRigRgg { .. }, _) => (LimitForm::None, Claim::Audit),
        };
        Ok(Self {
            family,
            property,
            lnln_coefficient,
            limit,
            claim,
        })
    }

    /// The scaling argument is a constant (`a` or `b`) rather than a deviation.
    pub fn uses_constant(&self) -> bool {
        matches!(self.limit, LimitForm::RggTorus | LimitForm::RggSquare)
    }
}

/// A limiting probability, or a statement that none is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    Probability(f64),
    Unspecified,
}

impl Prediction {
    pub fn probability(&self) -> Option<f64> {
        match *self {
            Prediction::Probability(p) => Some(p),
            Prediction::Unspecified => None,
        }
    }
}

impl Serialize for Prediction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Prediction::Probability(p) => serializer.serialize_f64(*p),
            Prediction::Unspecified => serializer.serialize_str("unspecified"),
        }
    }
}

impl<'de> Deserialize<'de> for Prediction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Ok(Prediction::Probability(p)),
            Raw::Str(s) if s == "unspecified" => Ok(Prediction::Unspecified),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("unknown prediction {s:?}"))),
        }
    }
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

/// Limiting probability at deviation (or constant) `x`; `x` may be infinite.
pub fn limiting_probability(spec: &ThresholdSpec, x: f64) -> Prediction {
    if x.is_nan() {
        return Prediction::Unspecified;
    }
    match spec.limit {
        LimitForm::PoissonKConn { k } => {
            Prediction::Probability((-(-x).exp() / factorial(k as u32 - 1)).exp())
        }
        LimitForm::Gumbel => Prediction::Probability((-(-x).exp()).exp()),
        LimitForm::ZeroOneOnly => {
            if x == f64::NEG_INFINITY {
                Prediction::Probability(0.0)
            } else if x == f64::INFINITY {
                Prediction::Probability(1.0)
            } else {
                Prediction::Unspecified
            }
        }
        LimitForm::RggTorus | LimitForm::RggSquare => {
            if x < 1.0 {
                Prediction::Probability(0.0)
            } else if x > 1.0 {
                Prediction::Probability(1.0)
            } else {
                Prediction::Unspecified
            }
        }
        LimitForm::None => Prediction::Unspecified,
    }
}

/// The left-hand side of the family's scaling law.
pub fn coupling_value(spec: &ModelSpec) -> Result<f64> {
    spec.validate()?;
    let family = ModelFamily::of(spec)?;
    match (family, spec) {
        (ModelFamily::UniformRig { s }, ModelSpec::UniformRig(p)) => Ok(uniform_coupling(p.k as f64, p.p as f64, s)),
        (ModelFamily::BinomialRig { s }, ModelSpec::BinomialRig(p)) => Ok(binomial_coupling(p.t, p.p as f64, s)),
        (ModelFamily::Er, ModelSpec::Er(p)) => Ok(p.q),
        (ModelFamily::UniformRigEr { .. }, ModelSpec::Intersection(_)) => exact_edge_probability(spec),
        (ModelFamily::UniformRigRgg { .. }, ModelSpec::Intersection(parts)) => {
            let (u, g) = rig_and_rgg(parts);
            Ok(PI * g.r * g.r * (u.k as f64).powi(2) / u.p as f64)
        }
        _ => unreachable!("family derived from spec"),
    }
}

fn uniform_coupling(k: f64, p: f64, s: u32) -> f64 {
    (k * k / p).powi(s as i32) / factorial(s)
}

fn binomial_coupling(t: f64, p: f64, s: u32) -> f64 {
    (t * t * p).powi(s as i32) / factorial(s)
}

fn rig_and_rgg(parts: &[ModelSpec]) -> (UniformRigParams, RggParams) {
    match parts {
        [ModelSpec::UniformRig(u), ModelSpec::Rgg(g)] | [ModelSpec::Rgg(g), ModelSpec::UniformRig(u)] => (*u, *g),
        _ => unreachable!("checked by ModelFamily::of"),
    }
}

fn rig_and_er(parts: &[ModelSpec]) -> (UniformRigParams, ErParams) {
    match parts {
        [ModelSpec::UniformRig(u), ModelSpec::Er(e)] | [ModelSpec::Er(e), ModelSpec::UniformRig(u)] => (*u, *e),
        _ => unreachable!("checked by ModelFamily::of"),
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(invalid(format!("deviations need n >= 3 so that ln ln n > 0, got {n}")));
    }
    Ok(())
}

/// `n * coupling - ln n - c ln ln n`.
pub fn deviation_from_coupling(n: usize, coupling: f64, property: &PropertyKind) -> Result<f64> {
    check_n(n)?;
    let c = ThresholdSpec::new(ModelFamily::Er, *property)?.lnln_coefficient;
    let ln_n = (n as f64).ln();
    Ok(n as f64 * coupling - ln_n - c * ln_n.ln())
}

/// Deviation implied by a concrete model for `property`.
pub fn deviation_from_params(spec: &ModelSpec, property: &PropertyKind) -> Result<f64> {
    deviation_from_coupling(spec.node_count(), coupling_value(spec)?, property)
}

/// The torus constant `a = n * coupling / ln n`, or the square constant `b`.
pub fn rgg_constant(spec: &ModelSpec) -> Result<f64> {
    let family = ModelFamily::of(spec)?;
    let ModelSpec::Intersection(parts) = spec else {
        return Err(Error::Unsupported(format!("{family} has no geometric constant")));
    };
    let ModelFamily::UniformRigRgg { region } = family else {
        return Err(Error::Unsupported(format!("{family} has no geometric constant")));
    };
    let (u, g) = rig_and_rgg(parts);
    check_n(u.n)?;
    Ok(match region {
        Region::Torus => {
            let n = u.n as f64;
            n * coupling_value(spec)? / n.ln()
        }
        Region::Square => rgg_square_threshold(u.k, u.p, g.r, u.n),
    })
}

/// Whether `K^2/P` lies above the split `1 / (n^{1/3} ln n)` between the two
/// square-region scalings.
pub fn square_first_branch(ratio: f64, n: usize) -> bool {
    let n = n as f64;
    ratio > 1.0 / (n.cbrt() * n.ln())
}

/// Denominator `D(n)` of the square-region constant for `ratio = K^2/P`.
pub fn square_denominator(ratio: f64, n: usize) -> f64 {
    let nf = n as f64;
    if square_first_branch(ratio, n) {
        (nf / ratio).ln() / nf
    } else {
        4.0 * (1.0 / ratio).ln() / nf
    }
}

/// The square-region constant `b = (pi r^2 K^2 / P) / D(n)`.
pub fn rgg_square_threshold(k: u64, p: u64, r: f64, n: usize) -> f64 {
    let ratio = (k as f64).powi(2) / p as f64;
    PI * r * r * ratio / square_denominator(ratio, n)
}

/// Probability that two fixed nodes share at least `s` of their `K` items
/// drawn from a pool of `P`: the upper tail of a hypergeometric law.
///
/// Terms follow the ratio recurrence
/// `h(i+1)/h(i) = (K-i)^2 / ((i+1)(P-2K+i+1))` in the log domain, seeded with
/// `ln h(0) = sum_j ln(1 - K/(P-j))`, which stays accurate for `P` far larger
/// than `K`.
pub fn uniform_overlap_tail(k: u64, p: u64, s: u32) -> f64 {
    let s = s as u64;
    if s > k || k > p {
        return 0.0;
    }
    let i0 = (2 * k).saturating_sub(p);
    let log_h0 = if i0 == 0 {
        (0..k).map(|j| (-(k as f64) / (p - j) as f64).ln_1p()).sum::<f64>()
    } else {
        ln_binomial(k, i0) + ln_binomial(p - k, k - i0) - ln_binomial(p, k)
    };
    if s <= i0 {
        return 1.0;
    }
    let mut logs = Vec::with_capacity((k - i0 + 1) as usize);
    let mut log_h = log_h0;
    for i in i0..=k {
        logs.push(log_h);
        if i < k {
            let num = ((k - i) as f64).powi(2);
            let den = (i + 1) as f64 * (p + i + 1 - 2 * k) as f64;
            log_h += (num / den).ln();
        }
    }
    // Normalising by the whole mass cancels drift in the recurrence.
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let split = (s - i0) as usize;
    let lower: f64 = logs[..split].iter().map(|l| (l - max).exp()).sum();
    let upper: f64 = logs[split..].iter().map(|l| (l - max).exp()).sum();
    upper / (lower + upper)
}

/// `P[Binomial(P, t^2) >= s]`.
pub fn binomial_overlap_tail(t: f64, p: u64, s: u32) -> f64 {
    let x = t * t;
    if s as u64 > p || x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    beta_reg(s as f64, (p - s as u64 + 1) as f64, x)
}

/// Probability that two uniform points are within distance `r`.
pub fn rgg_edge_probability(r: f64, region: Region) -> f64 {
    let r2 = r * r;
    match region {
        Region::Torus => {
            if r <= 0.5 {
                PI * r2
            } else if r < std::f64::consts::FRAC_1_SQRT_2 {
                // disc minus the four caps beyond |x| = 1/2 or |y| = 1/2
                let cap = r2 * (0.5 / r).acos() - 0.5 * (r2 - 0.25).sqrt();
                PI * r2 - 4.0 * cap
            } else {
                1.0
            }
        }
        Region::Square => {
            if r <= 1.0 {
                r2 * (PI - 8.0 * r / 3.0 + r2 / 2.0)
            } else if r < std::f64::consts::SQRT_2 {
                1.0 / 3.0 - 2.0 * r2 - r2 * r2 / 2.0
                    + 4.0 / 3.0 * (2.0 * r2 + 1.0) * (r2 - 1.0).sqrt()
                    + 2.0 * r2 * ((1.0 / r).asin() - (1.0 / r).acos())
            } else {
                1.0
            }
        }
    }
}

/// Exact probability that a fixed pair of nodes is adjacent.
pub fn exact_edge_probability(spec: &ModelSpec) -> Result<f64> {
    spec.validate()?;
    Ok(match spec {
        ModelSpec::UniformRig(p) => uniform_overlap_tail(p.k, p.p, p.s),
        ModelSpec::BinomialRig(p) => binomial_overlap_tail(p.t, p.p, p.s),
        ModelSpec::Er(p) => p.q,
        ModelSpec::Rgg(p) => rgg_edge_probability(p.r, p.region),
        ModelSpec::Intersection(parts) => {
            let mut prob = 1.0;
            for part in parts {
                prob *= exact_edge_probability(part)?;
            }
            prob
        }
    })
}

/// Fixed parameters for [`solve_param`]; the free one is left as `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FreeParam {
    K,
    #[serde(rename = "t")]
    T,
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "r")]
    R,
}

impl fmt::Display for FreeParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FreeParam::K => "K",
            FreeParam::T => "t",
            FreeParam::Q => "q",
            FreeParam::R => "r",
        })
    }
}

/// What to solve for: hit `target` (a deviation, or the constant `a`/`b` for
/// geometric compositions) at node count `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveRequest {
    pub family: ModelFamily,
    pub property: PropertyKind,
    pub n: usize,
    pub target: f64,
    #[serde(default)]
    pub fixed: FixedParams,
}

/// A concrete parameter choice and the deviation it actually realises.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub value: f64,
    pub spec: ModelSpec,
    pub implied_deviation: f64,
    /// `a` or `b` for geometric compositions.
    pub implied_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub free: FreeParam,
    /// Real-valued solution; `None` when the target needs a non-positive coupling.
    pub real: Option<f64>,
    /// True when the candidates sit at the lower edge of the domain.
    pub clamped: bool,
    pub candidates: Vec<Candidate>,
}

/// How to pick among integer candidates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    /// Candidate whose implied deviation is closest to the target.
    #[default]
    Nearest,
    Floor,
    Ceil,
}

impl Solution {
    pub fn pick(&self, rounding: Rounding, target: f64, uses_constant: bool) -> &Candidate {
        let key = |c: &Candidate| {
            if uses_constant {
                c.implied_constant.unwrap_or(f64::NAN)
            } else {
                c.implied_deviation
            }
        };
        match rounding {
            Rounding::Floor => self.candidates.first().unwrap(),
            Rounding::Ceil => self.candidates.last().unwrap(),
            Rounding::Nearest => self
                .candidates
                .iter()
                .min_by(|a, b| (key(a) - target).abs().total_cmp(&(key(b) - target).abs()))
                .unwrap(),
        }
    }
}

impl SolveRequest {
    fn threshold(&self) -> Result<ThresholdSpec> {
        ThresholdSpec::new(self.family, self.property)
    }

    pub fn free_param(&self) -> FreeParam {
        match self.family {
            ModelFamily::UniformRig { .. } => FreeParam::K,
            ModelFamily::BinomialRig { .. } => FreeParam::T,
            ModelFamily::Er | ModelFamily::UniformRigEr { .. } => FreeParam::Q,
            ModelFamily::UniformRigRgg { .. } => FreeParam::R,
        }
    }

    fn need<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| invalid(format!("{} needs a fixed value for {name}", self.family)))
    }

    /// Concrete model at `value` of the free parameter (K is rounded).
    pub fn instantiate(&self, value: f64) -> Result<ModelSpec> {
        let n = self.n;
        let f = &self.fixed;
        let spec = match self.family {
            ModelFamily::UniformRig { s } => ModelSpec::UniformRig(UniformRigParams {
                n,
                k: value.round() as u64,
                p: self.need(f.p, "P")?,
                s,
            }),
            ModelFamily::BinomialRig { s } => ModelSpec::BinomialRig(BinomialRigParams {
                n,
                t: value,
                p: self.need(f.p, "P")?,
                s,
            }),
            ModelFamily::Er => ModelSpec::Er(ErParams { n, q: value }),
            ModelFamily::UniformRigEr { s } => ModelSpec::Intersection(vec![
                ModelSpec::UniformRig(UniformRigParams {
                    n,
                    k: self.need(f.k, "K")?,
                    p: self.need(f.p, "P")?,
                    s,
                }),
                ModelSpec::Er(ErParams { n, q: value }),
            ]),
            ModelFamily::UniformRigRgg { region } => ModelSpec::Intersection(vec![
                ModelSpec::UniformRig(UniformRigParams {
                    n,
                    k: self.need(f.k, "K")?,
                    p: self.need(f.p, "P")?,
                    s: 1,
                }),
                ModelSpec::Rgg(RggParams { n, r: value, region }),
            ]),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The coupling at a real-valued free parameter (no rounding of K).
    pub fn coupling_at(&self, value: f64) -> Result<f64> {
        let f = &self.fixed;
        Ok(match self.family {
            ModelFamily::UniformRig { s } => uniform_coupling(value, self.need(f.p, "P")? as f64, s),
            ModelFamily::BinomialRig { s } => binomial_coupling(value, self.need(f.p, "P")? as f64, s),
            ModelFamily::Er => value,
            ModelFamily::UniformRigEr { s } => {
                uniform_overlap_tail(self.need(f.k, "K")?, self.need(f.p, "P")?, s) * value
            }
            ModelFamily::UniformRigRgg { .. } => {
                let k = self.need(f.k, "K")? as f64;
                PI * value * value * k * k / self.need(f.p, "P")? as f64
            }
        })
    }

    /// Coupling that realises the target.
    pub fn required_coupling(&self) -> Result<f64> {
        check_n(self.n)?;
        let spec = self.threshold()?;
        let n = self.n as f64;
        let ln_n = n.ln();
        if let ModelFamily::UniformRigRgg { region } = self.family {
            return Ok(match region {
                Region::Torus => self.target * ln_n / n,
                Region::Square => {
                    let k = self.need(self.fixed.k, "K")? as f64;
                    let ratio = k * k / self.need(self.fixed.p, "P")? as f64;
                    self.target * square_denominator(ratio, self.n)
                }
            });
        }
        Ok((ln_n + spec.lnln_coefficient * ln_n.ln() + self.target) / n)
    }
}

/// Inverts the scaling law for the single free parameter of `req.family`.
///
/// Integer parameters (K) yield floor and ceiling candidates clamped to the
/// valid range; each candidate carries the deviation it actually implies.
/// A target that needs a non-positive coupling is clamped to the bottom of
/// the domain; one that needs `q > 1`, `t > 1` or `K > P` is an error.
pub fn solve_param(req: &SolveRequest) -> Result<Solution> {
    let spec = req.threshold()?;
    let x = req.required_coupling()?;
    let free = req.free_param();
    let f = &req.fixed;
    let (real, mut values): (Option<f64>, Vec<f64>) = match req.family {
        ModelFamily::UniformRig { s } => {
            let p = req.need(f.p, "P")?;
            if x <= 0.0 {
                (None, vec![s as f64])
            } else {
                let k = (p as f64 * (factorial(s) * x).powf(1.0 / s as f64)).sqrt();
                if k > p as f64 {
                    return Err(Error::NoSolution(format!("K = {k:.4} exceeds P = {p}")));
                }
                let lo = (k.floor() as u64).clamp(s as u64, p);
                let hi = (k.ceil() as u64).clamp(s as u64, p);
                (Some(k), vec![lo as f64, hi as f64])
            }
        }
        ModelFamily::BinomialRig { s } => {
            let p = req.need(f.p, "P")? as f64;
            if x <= 0.0 {
                (None, vec![0.0])
            } else {
                let t = ((factorial(s) * x).powf(1.0 / s as f64) / p).sqrt();
                if t > 1.0 {
                    return Err(Error::NoSolution(format!("t = {t:.6} exceeds 1")));
                }
                (Some(t), vec![t])
            }
        }
        ModelFamily::Er => {
            if x <= 0.0 {
                (None, vec![0.0])
            } else if x > 1.0 {
                return Err(Error::NoSolution(format!("q = {x:.6} exceeds 1")));
            } else {
                (Some(x), vec![x])
            }
        }
        ModelFamily::UniformRigEr { s } => {
            if f.q.is_some() && f.k.is_none() {
                return Err(Error::Unsupported(
                    "composed families solve for q; fix K and P instead".into(),
                ));
            }
            let pe = uniform_overlap_tail(req.need(f.k, "K")?, req.need(f.p, "P")?, s);
            if x <= 0.0 {
                (None, vec![0.0])
            } else if pe <= 0.0 || x / pe > 1.0 {
                return Err(Error::NoSolution(format!(
                    "q = {:.6} exceeds 1 (key-graph edge probability {pe:.6})",
                    x / pe
                )));
            } else {
                (Some(x / pe), vec![x / pe])
            }
        }
        ModelFamily::UniformRigRgg { .. } => {
            let k = req.need(f.k, "K")? as f64;
            let p = req.need(f.p, "P")? as f64;
            if x <= 0.0 {
                (None, vec![0.0])
            } else {
                let r = (x / (PI * k * k / p)).sqrt();
                (Some(r), vec![r])
            }
        }
    };
    values.dedup();
    let candidates = values
        .into_iter()
        .map(|value| {
            let model = req.instantiate(value)?;
            let implied_deviation = deviation_from_params(&model, &req.property)?;
            let implied_constant = if spec.uses_constant() { Some(rgg_constant(&model)?) } else { None };
            Ok(Candidate {
                value,
                spec: model,
                implied_deviation,
                implied_constant,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Solution {
        free,
        real,
        clamped: real.is_none(),
        candidates,
    })
}

/// One asymptotic side condition evaluated at finite `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideCondition {
    /// The asymptotic statement, e.g. `P = Omega(n)`.
    pub condition: String,
    /// The finite ratio that stands in for it, e.g. `P/n`.
    pub ratio: String,
    pub value: f64,
    /// Proxy test applied to `value`, e.g. `>= 1`.
    pub proxy: String,
    pub holds: bool,
}

fn at_least(condition: &str, ratio: &str, value: f64, bound: f64) -> SideCondition {
    SideCondition {
        condition: condition.into(),
        ratio: ratio.into(),
        value,
        proxy: format!(">= {bound}"),
        holds: value >= bound,
    }
}

fn at_most(condition: &str, ratio: &str, value: f64, bound: f64) -> SideCondition {
    SideCondition {
        condition: condition.into(),
        ratio: ratio.into(),
        value,
        proxy: format!("<= {bound}"),
        holds: value <= bound,
    }
}

fn above(condition: &str, ratio: &str, value: f64, bound: f64) -> SideCondition {
    SideCondition {
        condition: condition.into(),
        ratio: ratio.into(),
        value,
        proxy: format!("> {bound}"),
        holds: value > bound,
    }
}

/// Advisory finite-n renderings of the side conditions attached to the law
/// for `spec` and `property`.
pub fn side_conditions(spec: &ModelSpec, property: &PropertyKind) -> Result<Vec<SideCondition>> {
    let family = ModelFamily::of(spec)?;
    let n = spec.node_count() as f64;
    let ln_n = n.ln();
    let pool_exponent = |p: f64| p.ln() / ln_n;
    let omega_n = |p: f64| at_least("P = Ω(n)", "P/n", p / n, 1.0);
    let little_omega_log5 = |p: f64| at_least("P = ω(n (ln n)^5)", "P/(n (ln n)^5)", p / (n * ln_n.powi(5)), 10.0);
    let big_omega_log5 = |p: f64| at_least("P = Ω(n (ln n)^5)", "P/(n (ln n)^5)", p / (n * ln_n.powi(5)), 1.0);
    let poly = |p: f64, c0: f64| above(&format!("P = Ω(n^c), c > {c0}"), "ln P / ln n", pool_exponent(p), c0);
    let s = family.s();
    let mut out = Vec::new();
    match (family, spec) {
        (ModelFamily::Er, _) => {}
        (ModelFamily::UniformRig { .. }, ModelSpec::UniformRig(u)) => {
            let p = u.p as f64;
            if s >= 2 {
                out.push(poly(p, 2.0 - 1.0 / s as f64));
            } else {
                out.push(match property {
                    PropertyKind::MinDegreeAtLeast { .. } | PropertyKind::KConnected { .. } => omega_n(p),
                    PropertyKind::KRobust { .. } => big_omega_log5(p),
                    _ => little_omega_log5(p),
                });
            }
        }
        (ModelFamily::BinomialRig { .. }, ModelSpec::BinomialRig(b)) => {
            let p = b.p as f64;
            if s >= 2 {
                out.push(poly(p, 2.0 - 1.0 / s as f64));
            } else {
                out.push(match property {
                    PropertyKind::NearPerfectMatching => poly(p, 1.0),
                    PropertyKind::KRobust { .. } => big_omega_log5(p),
                    _ => little_omega_log5(p),
                });
            }
        }
        (ModelFamily::UniformRigEr { .. }, ModelSpec::Intersection(parts)) => {
            let (u, _) = rig_and_er(parts);
            out.push(omega_n(u.p as f64));
            out.push(at_most("K/P = o(1)", "K/P", u.k as f64 / u.p as f64, 0.1));
        }
        (ModelFamily::UniformRigRgg { .. }, ModelSpec::Intersection(parts)) => {
            let (u, _) = rig_and_rgg(parts);
            let (k, p) = (u.k as f64, u.p as f64);
            let ratio = k * k / p;
            out.push(at_least("K = ω(ln n)", "K/ln n", k / ln_n, 10.0));
            out.push(at_most("K^2/P = O(1/ln n)", "(K^2/P) ln n", ratio * ln_n, 1.0));
            out.push(at_least("K^2/P = ω(ln n / n)", "(K^2/P) n / ln n", ratio * n / ln_n, 10.0));
            out.push(at_most("K/P = o(1/n)", "K n / P", k * n / p, 0.1));
        }
        _ => unreachable!("family derived from spec"),
    }
    Ok(out)
}

/// Everything known about one configuration under one property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub family: ModelFamily,
    pub property: PropertyKind,
    pub n: usize,
    pub coupling: f64,
    pub deviation: f64,
    pub lnln_coefficient: f64,
    pub rgg_constant: Option<f64>,
    pub prediction: Prediction,
    pub claim: Claim,
    pub side_conditions: Vec<SideCondition>,
}

pub fn coupling_report(spec: &ModelSpec, property: &PropertyKind) -> Result<CouplingReport> {
    let family = ModelFamily::of(spec)?;
    let threshold = ThresholdSpec::new(family, *property)?;
    let coupling = coupling_value(spec)?;
    let deviation = deviation_from_params(spec, property)?;
    let rgg = if matches!(family, ModelFamily::UniformRigRgg { .. }) { Some(rgg_constant(spec)?) } else { None };
    let prediction = limiting_probability(&threshold, rgg.unwrap_or(deviation));
    Ok(CouplingReport {
        family,
        property: *property,
        n: spec.node_count(),
        coupling,
        deviation,
        lnln_coefficient: threshold.lnln_coefficient,
        rgg_constant: rgg,
        prediction,
        claim: threshold.claim,
        side_conditions: side_conditions(spec, property)?,
    })
}
