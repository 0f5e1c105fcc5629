//! Commensurability arithmetic behind the von Neumann factor types of the
//! translation-invariant diagonal states.
//!
//! The scalar content of the modular data is the probability pairs
//! p₁ = 1/(e^{−2βJ}+1), p₁₁ = 1/(e^{−2βJ₁}+1) together with the field
//! value h = ½ log u* of the state. The type is III_δ when the ratios
//! p₁/p₂, p₁₁/p₂₂, p₁/p₁₁ (and e^{h} for the ordered states) are integer
//! powers of a single smallest δ ∈ (0,1), with modular period
//! t₀ = −2π/log δ; III₁ when no such δ exists within tolerance; II₁ for
//! the trace case J = J₁ = 0, h = 0.
//!
//! Exclusion rule: a ratio equal to 1 contributes exponent 0 and never
//! blocks commensurability, and the cross ratio p₁/p₁₁ participates only
//! when both couplings are nonzero: a degenerate block (p₁ = p₂ or
//! p₁₁ = p₂₂) is a multiple of the identity and contributes no modular
//! constraint, so conditions crossing into it drop.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::recursion::{classify_region, ti_fixed_points, Region};
use crate::util::{bisect, convergents, gcd_i64};

/// Default tolerance for the commensurability search.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default bound on exponent magnitudes and rational denominators.
pub const DEFAULT_MAX_EXPONENT: u32 = 64;

/// Ratios within this distance of 1 are treated as exactly 1.
const RATIO_UNIT_TOL: f64 = 1e-14;

/// The bond probability pairs (p₁, p₂) for the ternary coupling and
/// (p₁₁, p₂₂) for the binary coupling; each pair sums to 1 exactly as
/// constructed, and p₁/p₂ = θ, p₁₁/p₂₂ = θ₁.
#[derive(Clone, Copy, Debug)]
pub struct FactorProbabilities {
    pub p1: f64,
    pub p2: f64,
    pub p11: f64,
    pub p22: f64,
}

pub fn probabilities(params: &ModelParams) -> FactorProbabilities {
    let e_j = (-2.0 * params.beta() * params.j()).exp();
    let p1 = 1.0 / (e_j + 1.0);
    let e_j1 = (-2.0 * params.beta() * params.j1()).exp();
    let p11 = 1.0 / (e_j1 + 1.0);
    FactorProbabilities {
        p1,
        p2: 1.0 - p1,
        p11,
        p22: 1.0 - p11,
    }
}

/// The cross ratio p₁/p₁₁ = (1 + e^{−2βJ₁})/(1 + e^{−2βJ}), evaluated
/// directly from the couplings for full precision.
pub fn cross_ratio(params: &ModelParams) -> f64 {
    let e_j = (-2.0 * params.beta() * params.j()).exp();
    let e_j1 = (-2.0 * params.beta() * params.j1()).exp();
    (1.0 + e_j1) / (1.0 + e_j)
}

/// Outcome of the common-power search over a ratio list and an optional
/// field value e^{h}.
#[derive(Clone, Debug)]
pub struct CommensurabilityResult {
    pub found: bool,
    /// All supplied ratios equal 1 and no field term was given.
    pub trace_like: bool,
    /// The smallest δ ∈ (0,1) (largest |log δ|) whose integer powers
    /// reproduce every active value; exponents then have gcd 1.
    pub delta: Option<f64>,
    /// Exponent per input ratio, 0 for excluded (unit) ratios.
    pub exponents: Vec<i64>,
    /// Exponent of the field value e^{h}, when one was supplied.
    pub k: Option<i64>,
    /// Indices of ratios equal to 1, excluded from the search.
    pub excluded_ratios: Vec<usize>,
}

/// One step of the real gcd: finds g with a = q·g, b = p·g for coprime
/// integers |p|, q ≤ max_exponent, accepting the first convergent of b/a
/// whose residual passes.
fn real_gcd_pair(a: f64, b: f64, tol: f64, max_exponent: i64) -> Option<f64> {
    let t = b / a;
    for (p, q) in convergents(t, max_exponent) {
        if p == 0 {
            continue;
        }
        let g = a / q as f64;
        if (b - p as f64 * g).abs() <= tol * g.abs() {
            return Some(g);
        }
    }
    None
}

/// Searches for the smallest δ ∈ (0,1) such that every ratio different
/// from 1 (and the field value, when given) is an integer power of δ with
/// |exponent| ≤ max_exponent, each to within |log r − m·log δ| ≤
/// tol·|log δ|. Ratios equal to 1 are recorded as excluded with exponent 0.
pub fn find_commensurable(
    ratios: &[f64],
    extra: Option<f64>,
    tol: f64,
    max_exponent: u32,
) -> Result<CommensurabilityResult> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "tol must lie in (0, 1e-3], got {tol}"
        )));
    }
    if max_exponent == 0 || max_exponent > 64 {
        return Err(Error::InvalidParameter(format!(
            "max_exponent must lie in 1..=64, got {max_exponent}"
        )));
    }
    for &r in ratios.iter().chain(extra.iter()) {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Domain(format!("ratios must be finite and positive, got {r}")));
        }
    }

    let mut excluded_ratios = Vec::new();
    let mut active: Vec<(usize, f64)> = Vec::new();
    for (i, &r) in ratios.iter().enumerate() {
        if (r - 1.0).abs() < RATIO_UNIT_TOL {
            excluded_ratios.push(i);
        } else {
            active.push((i, r.ln()));
        }
    }
    let extra_log = match extra {
        Some(x) if (x - 1.0).abs() >= RATIO_UNIT_TOL => Some(x.ln()),
        Some(_) => None, // unit field value contributes exponent 0
        None => None,
    };

    let mut values: Vec<f64> = active.iter().map(|&(_, l)| l).collect();
    if let Some(l) = extra_log {
        values.push(l);
    }

    let mut result = CommensurabilityResult {
        found: false,
        trace_like: values.is_empty(),
        delta: None,
        exponents: vec![0; ratios.len()],
        k: extra.map(|_| 0),
        excluded_ratios,
    };
    if values.is_empty() {
        return Ok(result);
    }

    let max_exp = max_exponent as i64;
    let mut g = values[0];
    for &v in &values[1..] {
        match real_gcd_pair(g, v, tol, max_exp) {
            Some(next) => g = next,
            None => return Ok(result),
        }
    }

    // normalize: δ ∈ (0,1) and exponent gcd 1
    let mut d = -g.abs();
    let mut exps: Vec<i64> = values.iter().map(|&v| (v / d).round() as i64).collect();
    let common = exps.iter().fold(0i64, |acc, &e| gcd_i64(acc, e));
    if common > 1 {
        d *= common as f64;
        for e in &mut exps {
            *e /= common;
        }
    }
    for (&v, &m) in values.iter().zip(&exps) {
        if m == 0 || m.abs() > max_exp || (v - m as f64 * d).abs() > tol * d.abs() {
            return Ok(result);
        }
    }

    result.found = true;
    result.delta = Some(d.exp());
    for (slot, &(i, _)) in active.iter().enumerate() {
        result.exponents[i] = exps[slot];
    }
    if extra_log.is_some() {
        result.k = Some(exps[active.len()]);
    }
    Ok(result)
}

/// A reduced fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// r = log δ₁ / log δ as a reduced fraction with denominator ≤
/// `max_denominator`, fitted to 1e−10 and required to lie in (0,1);
/// `None` when no such fraction exists (including r = 1).
pub fn subfactor_exponent(
    delta: f64,
    delta1: f64,
    max_denominator: u32,
) -> Result<Option<Rational>> {
    for d in [delta, delta1] {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Domain(format!(
                "subfactor exponent needs deltas in (0,1), got {d}"
            )));
        }
    }
    let r = delta1.ln() / delta.ln();
    for (p, q) in convergents(r, max_denominator as i64) {
        if q <= 0 {
            continue;
        }
        if (r - p as f64 / q as f64).abs() <= 1e-10 {
            if p <= 0 || p >= q {
                return Ok(None); // outside (0,1)
            }
            debug_assert!(delta1 > delta, "r < 1 forces delta1 > delta");
            return Ok(Some(Rational { num: p, den: q }));
        }
    }
    Ok(None)
}

/// Modular period t₀ = −2π/log δ of a type III_δ factor.
pub fn modular_period(delta: f64) -> f64 {
    assert!(delta > 0.0 && delta < 1.0, "modular period needs delta in (0,1)");
    -2.0 * std::f64::consts::PI / delta.ln()
}

/// Factor type tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FactorType {
    /// Type III_δ with the given δ ∈ (0,1).
    IIILambda(f64),
    /// Type III₁ (no commensurable δ within tolerance).
    III1,
    /// Type II₁ (trace state: J = J₁ = 0, zero field).
    II1,
}

impl FactorType {
    pub fn tag(&self) -> &'static str {
        match self {
            FactorType::IIILambda(_) => "III_lambda",
            FactorType::III1 => "III_1",
            FactorType::II1 => "II_1",
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            FactorType::IIILambda(d) => Some(*d),
            _ => None,
        }
    }
}

/// Whether the verdict rests on exactly representable coupling structure
/// or on the numerical search alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictBasis {
    /// J = 0, J₁ = 0 or J = J₁: the ratio structure is exact.
    Structured,
    /// General couplings: the verdict holds at the reported tolerance.
    Numerical,
}

/// Full classification of the factor attached to one translation-invariant
/// state.
#[derive(Clone, Debug)]
pub struct FactorClassification {
    pub measure: u8,
    pub factor_type: FactorType,
    /// Exponents for the ratio slots [p₁/p₂, p₁₁/p₂₂, p₁/p₁₁];
    /// excluded slots carry 0.
    pub exponents: Vec<i64>,
    /// Slots excluded from the search (unit ratios and the cross ratio
    /// when a coupling vanishes).
    pub excluded: Vec<usize>,
    /// Field exponent k with e^{h} = δ^k, for the ordered states.
    pub field_exponent: Option<i64>,
    /// t₀ = −2π/log δ when the type is III_δ.
    pub modular_period: Option<f64>,
    /// r with δ = δ₂^r relating this factor to the unordered-phase one,
    /// when both classifications produced a δ.
    pub subfactor_r: Option<Rational>,
    pub basis: VerdictBasis,
    pub tol: f64,
    pub max_exponent: u32,
}

/// Classifies the factor of the state indexed 1, 2 or 3 (minimal,
/// unordered, maximal). States 1 and 3 require the three-solution region
/// and always classify identically; the unordered state classifies
/// everywhere.
pub fn classify(
    params: &ModelParams,
    measure: u8,
    tol: f64,
    max_exponent: u32,
) -> Result<FactorClassification> {
    if !(1..=3).contains(&measure) {
        return Err(Error::InvalidParameter(format!(
            "measure index must be 1, 2 or 3, got {measure}"
        )));
    }
    let region = classify_region(params).region;
    if measure != 2 && region != Region::ThreeTranslationInvariant {
        return Err(Error::Region(format!(
            "measure {measure} exists only in the three-solution region \
             (theta1 > sqrt(3), theta > 2*theta1/(theta1^2-3)); \
             got theta={}, theta1={}",
            params.theta(),
            params.theta1()
        )));
    }

    let cross_active = params.j() != 0.0 && params.j1() != 0.0;
    let mut input = vec![params.theta(), params.theta1()];
    if cross_active {
        input.push(cross_ratio(params));
    }

    // both ordered states carry the positive field h = ½ log u₃ of the
    // larger fixed point; the mirror state has the same δ and negated k
    let extra = if measure == 2 {
        None
    } else {
        let u3 = ti_fixed_points(params)
            .u3()
            .ok_or_else(|| Error::Region("no nontrivial fixed points".into()))?;
        Some((0.5 * u3.ln()).exp())
    };

    let res = find_commensurable(&input, extra, tol, max_exponent)?;

    let mut exponents = vec![0i64; 3];
    exponents[..2].copy_from_slice(&res.exponents[..2]);
    let mut excluded: Vec<usize> = res.excluded_ratios.clone();
    if cross_active {
        exponents[2] = *res.exponents.get(2).unwrap_or(&0);
    } else if !excluded.contains(&2) {
        excluded.push(2);
    }
    excluded.sort_unstable();

    let factor_type = if res.trace_like {
        FactorType::II1
    } else if let Some(delta) = res.delta {
        FactorType::IIILambda(delta)
    } else {
        FactorType::III1
    };

    let subfactor_r = if measure != 2 {
        if let FactorType::IIILambda(delta1) = factor_type {
            let base = find_commensurable(&input, None, tol, max_exponent)?;
            match base.delta {
                Some(delta2) => subfactor_exponent(delta2, delta1, max_exponent)?,
                None => None,
            }
        } else {
            None
        }
    } else {
        None
    };

    let basis = if params.j() == 0.0 || params.j1() == 0.0 || params.j() == params.j1() {
        VerdictBasis::Structured
    } else {
        VerdictBasis::Numerical
    };

    Ok(FactorClassification {
        measure,
        modular_period: factor_type.delta().map(modular_period),
        factor_type,
        exponents,
        excluded,
        field_exponent: res.k,
        subfactor_r,
        basis,
        tol,
        max_exponent,
    })
}

/// Reconstructs the probability pairs from δ and the exponents and checks
/// that they reproduce the three ratio conditions identically.
pub fn reconstruct_probabilities(delta: f64, m1: i64, m2: i64, m3: i64) -> (f64, f64, f64, f64) {
    let denom = delta.powi(m1 as i32) + 1.0;
    let p1 = delta.powi(m1 as i32) / denom;
    let p2 = 1.0 / denom;
    let p11 = delta.powi((m1 - m3) as i32) / denom;
    let p22 = delta.powi((m1 - m2 - m3) as i32) / denom;
    (p1, p2, p11, p22)
}

/// Algebraic round trip of the parametrized probabilities against the
/// ratio conditions, to 1e−14 relative.
pub fn verify_ratio_parametrization(delta: f64, m1: i64, m2: i64, m3: i64) -> bool {
    if !(delta > 0.0 && delta < 1.0) {
        return false;
    }
    let (p1, p2, p11, p22) = reconstruct_probabilities(delta, m1, m2, m3);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-14 * a.abs().max(b.abs()).max(1.0);
    close(p1 / p2, delta.powi(m1 as i32))
        && close(p11 / p22, delta.powi(m2 as i32))
        && close(p1 / p11, delta.powi(m3 as i32))
}

/// Report of the worked case with J = 0 and the nearest-neighbor weight
/// tuned so the quarter power δ₁ = δ^{1/4} classifies the ordered states.
///
/// The tuning condition is the cubic θ̃³ + 5θ̃² + 7θ̃ − 5 = 0 for
/// θ̃ = tanh(βJ₁) ∈ (½, 1); at its root the surd identity
/// √(2θ̃−1) + √(1−θ̃²) = 1 holds, which makes the ordered-state field
/// satisfy h₁ = ½·arctanh(θ̃) = ¼·log θ₁ exactly.
#[derive(Clone, Debug)]
pub struct QuarterPowerCase {
    pub theta_tilde: f64,
    pub cubic_residual: f64,
    pub theta_tilde_in_range: bool,
    pub h1: f64,
    pub surd_identity_residual: f64,
    pub arctanh_relation_residual: f64,
    pub fixed_point_residual: f64,
    pub theta1: f64,
    pub delta: f64,
    pub delta1: f64,
    pub unordered: FactorClassification,
    pub ordered: FactorClassification,
    pub pass: bool,
}

pub fn quarter_power_case() -> Result<QuarterPowerCase> {
    let cubic = |x: f64| x * x * x + 5.0 * x * x + 7.0 * x - 5.0;
    let theta_tilde = bisect(cubic, 0.5, 1.0);
    let cubic_residual = cubic(theta_tilde).abs();
    let theta_tilde_in_range = theta_tilde > 0.5 && theta_tilde < 1.0;

    let h1 = ((2.0 * theta_tilde - 1.0).sqrt() / theta_tilde).atanh();
    let surd_identity_residual = ((2.0 * theta_tilde - 1.0).sqrt()
        + (1.0 - theta_tilde * theta_tilde).sqrt()
        - 1.0)
        .abs();
    let arctanh_relation_residual = (h1 - 0.5 * theta_tilde.atanh()).abs();

    let theta1 = (1.0 + theta_tilde) / (1.0 - theta_tilde);
    let delta = 1.0 / theta1;
    let delta1 = theta1.powf(-0.25);

    // β = 1, J = 0, J₁ = arctanh(θ̃) realizes θ̃ = tanh(βJ₁)
    let params = ModelParams::new(0.0, theta_tilde.atanh(), 1.0)?;
    let u3 = ti_fixed_points(&params)
        .u3()
        .ok_or_else(|| Error::Region("quarter-power case must lie in the ordered region".into()))?;
    let fixed_point_residual = ((2.0 * h1).exp() - u3).abs();

    let unordered = classify(&params, 2, DEFAULT_TOL, DEFAULT_MAX_EXPONENT)?;
    let ordered = classify(&params, 3, DEFAULT_TOL, DEFAULT_MAX_EXPONENT)?;

    let pass = cubic_residual <= 1e-14
        && theta_tilde_in_range
        && theta_tilde > 0.509
        && theta_tilde < 0.511
        && surd_identity_residual < 1e-10
        && arctanh_relation_residual < 1e-10
        && matches!(unordered.factor_type, FactorType::IIILambda(d) if (d - delta).abs() < 1e-9)
        && unordered.exponents == vec![0, -1, 0]
        && matches!(ordered.factor_type, FactorType::IIILambda(d) if (d - delta1).abs() < 1e-9)
        && ordered.exponents == vec![0, -4, 0]
        && ordered.field_exponent == Some(-1)
        && ordered.subfactor_r == Some(Rational { num: 1, den: 4 });

    Ok(QuarterPowerCase {
        theta_tilde,
        cubic_residual,
        theta_tilde_in_range,
        h1,
        surd_identity_residual,
        arctanh_relation_residual,
        fixed_point_residual,
        theta1,
        delta,
        delta1,
        unordered,
        ordered,
        pass,
    })
}

/// Report of the worked case with equal couplings at θ = 1 + √2, where
/// δ = √2 − 1, the ordered states classify as III_{√δ} and the subfactor
/// exponent is exactly ½. The field condition is the identity
/// δ + δ⁻¹ = θ² − 3, i.e. (θ+1)(θ²−2θ−1) = 0 at the chosen θ.
#[derive(Clone, Debug)]
pub struct HalfPowerCase {
    pub theta: f64,
    /// θ > √5, the phase-transition condition specialized to J = J₁.
    pub phase_condition: bool,
    pub u3: f64,
    pub u3_residual: f64,
    pub delta: f64,
    pub delta1: f64,
    pub modular_sum_residual: f64,
    pub t0: f64,
    pub t0_delta1: f64,
    pub unordered: FactorClassification,
    pub ordered: FactorClassification,
    pub pass: bool,
}

pub fn half_power_case() -> Result<HalfPowerCase> {
    let theta = 1.0 + std::f64::consts::SQRT_2;
    let params = ModelParams::from_thetas(theta, theta)?;
    let phase_condition = theta > 5f64.sqrt();

    let u3 = ti_fixed_points(&params)
        .u3()
        .ok_or_else(|| Error::Region("half-power case must lie in the ordered region".into()))?;
    let u3_residual = (u3 - (std::f64::consts::SQRT_2 + 1.0)).abs();

    let delta = std::f64::consts::SQRT_2 - 1.0;
    let delta1 = delta.sqrt();
    let modular_sum_residual = (delta + 1.0 / delta - (theta * theta - 3.0)).abs();

    let unordered = classify(&params, 2, DEFAULT_TOL, DEFAULT_MAX_EXPONENT)?;
    let ordered = classify(&params, 3, DEFAULT_TOL, DEFAULT_MAX_EXPONENT)?;
    let t0 = modular_period(delta);
    let t0_delta1 = modular_period(delta1);

    let pass = phase_condition
        && u3_residual < 1e-12
        && modular_sum_residual < 1e-12
        && matches!(unordered.factor_type, FactorType::IIILambda(d) if (d - delta).abs() < 1e-12)
        && unordered.exponents == vec![-1, -1, 0]
        && matches!(ordered.factor_type, FactorType::IIILambda(d) if (d - delta1).abs() < 1e-12)
        && ordered.field_exponent == Some(-1)
        && ordered.subfactor_r == Some(Rational { num: 1, den: 2 });

    Ok(HalfPowerCase {
        theta,
        phase_condition,
        u3,
        u3_residual,
        delta,
        delta1,
        modular_sum_residual,
        t0,
        t0_delta1,
        unordered,
        ordered,
        pass,
    })
}
