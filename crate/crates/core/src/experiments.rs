//! Numerical verification of the approximation inequalities for Fejér and
//! Nörlund means.
//!
//! A [`Subject`] caches the Walsh spectrum and modulus profiles of one test
//! function; every bound is then evaluated as an exact finite computation at
//! resolution `M`. Left-hand sides use the Walsh multiplier of the mean, so a
//! single fast transform gives `t_n f - f` for any order.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dyadic::{Resolution, StepFunction};
use crate::error::{Error, Result};
use crate::kernels::highest_bit;
use crate::metrics::{
    lip_generator, lp_norm_slice, modulus_profile, rate_fit, LipVariant, ModulusProfile, RateFit,
};
use crate::par;
use crate::transform::{analyze, fwht_sequential, walsh_function, Spectrum};
use crate::weights::{self, BoundednessEvidence, Monotonicity, WeightSequence};

/// A bound holds when `rhs - lhs >= -HOLD_TOLERANCE`.
pub const HOLD_TOLERANCE: f64 = 1e-9;

/// Errors below this are treated as exact zeros in rate fits.
pub const UNDERFLOW_FLOOR: f64 = 1e-13;

/// Allowed deviation of a fitted slope from the predicted exponent.
pub const SLOPE_TOLERANCE: f64 = 0.15;

/// Spread allowed for `error·n/log2 n` in the `α = 1` regime.
pub const LOG_REGIME_SPREAD: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Theorem {
    /// `‖σ_n f - f‖_p ≤ 3 Σ_{s≤N} 2^{s-N} ω_p(2^{-s}, f)`.
    #[serde(rename = "fejer")]
    Fejer,
    /// Non-decreasing weights, explicit constants 18 and 12.
    #[serde(rename = "t1")]
    T1,
    /// Non-increasing weights, dyadic orders.
    #[serde(rename = "t2")]
    T2,
    /// Non-increasing weights with `n/Q_n` bounded; constant unspecified.
    #[serde(rename = "t3")]
    T3,
    /// The earlier structural bound that needs the γ-moment condition.
    #[serde(rename = "ms")]
    MoriczSiddiqi,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [
        Self::Fejer,
        Self::T1,
        Self::T2,
        Self::T3,
        Self::MoriczSiddiqi,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::Fejer => "fejer",
            Self::T1 => "t1",
            Self::T2 => "t2",
            Self::T3 => "t3",
            Self::MoriczSiddiqi => "ms",
        }
    }

    /// Theorems whose rhs carries no explicit constant; they report ratios.
    pub fn is_ratio_only(self) -> bool {
        matches!(self, Self::T3 | Self::MoriczSiddiqi)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown theorem '{s}'")))
    }
}

/// Which summation method approximates `f`.
#[derive(Debug, Clone)]
pub enum MeanSpec {
    /// `S_n f`.
    PartialSums,
    /// `σ_n f`.
    Fejer,
    /// `t_n f` for the given weights.
    Norlund(WeightSequence),
}

impl MeanSpec {
    pub fn label(&self) -> String {
        match self {
            Self::PartialSums => "partial-sums".into(),
            Self::Fejer => "fejer".into(),
            Self::Norlund(q) => q.label().to_string(),
        }
    }

    fn check(&self, n: usize, resolution: Resolution) -> Result<()> {
        if n == 0 {
            return Err(Error::OrderTooSmall { order: 0, min: 1 });
        }
        resolution.check_order(n)?;
        if let Self::Norlund(q) = self {
            q.require(n)?;
        }
        Ok(())
    }

    /// Walsh multiplier `λ_n(k)` for `k < n`.
    #[inline]
    fn multiplier(&self, n: usize, k: usize) -> f64 {
        match self {
            Self::PartialSums => 1.0,
            Self::Fejer => (n - k) as f64 / n as f64,
            Self::Norlund(q) => q.prefix_unchecked(n - k) / q.prefix_unchecked(n),
        }
    }
}

/// One inequality evaluated at one order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub function: String,
    pub n: usize,
    /// `highest_bit(n)`, so `2^N ≤ n < 2^{N+1}`.
    #[serde(rename = "N")]
    pub big_n: u32,
    pub p: f64,
    pub weights: String,
    /// `‖t_n f - f‖_p`.
    pub lhs: f64,
    /// The bound. For ratio-only theorems this is the structural sum,
    /// multiplied by the user constant when one was supplied.
    pub rhs: f64,
    pub margin: f64,
    /// `lhs / structural sum` for ratio-only theorems, `lhs / rhs` otherwise;
    /// `None` when both sides vanish.
    pub ratio: Option<f64>,
    /// Structural sum is zero while `lhs` is not. Cannot happen for a
    /// correct implementation: it would mean a non-constant `f` with
    /// vanishing modulus.
    pub impossible: bool,
    pub holds: bool,
}

fn ratio_of(lhs: f64, denom: f64) -> Option<f64> {
    if denom > 0.0 {
        Some(lhs / denom)
    } else if lhs <= HOLD_TOLERANCE {
        None
    } else {
        Some(f64::INFINITY)
    }
}

/// Walsh spectrum and modulus profiles of a test function.
#[derive(Debug, Clone)]
pub struct Subject {
    name: String,
    f: StepFunction,
    spectrum: Spectrum,
    profiles: Vec<ModulusProfile>,
}

impl Subject {
    /// Precomputes modulus profiles for every exponent in `ps`.
    pub fn new(name: impl Into<String>, f: StepFunction, ps: &[f64]) -> Result<Self> {
        let spectrum = analyze(&f);
        let profiles = ps
            .iter()
            .map(|&p| modulus_profile(&f, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: name.into(),
            f,
            spectrum,
            profiles,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn function(&self) -> &StepFunction {
        &self.f
    }

    pub fn resolution(&self) -> Resolution {
        self.f.resolution()
    }

    pub fn profile(&self, p: f64) -> Result<&ModulusProfile> {
        self.profiles
            .iter()
            .find(|prof| prof.p == p)
            .ok_or_else(|| Error::Precondition(format!("no modulus profile prepared for p = {p}")))
    }

    /// Values of `mean_n f - f`.
    pub fn error_function(&self, mean: &MeanSpec, n: usize) -> Result<StepFunction> {
        mean.check(n, self.resolution())?;
        Ok(StepFunction::from_raw(
            self.resolution(),
            self.error_values(mean, n),
        ))
    }

    fn error_values(&self, mean: &MeanSpec, n: usize) -> Vec<f64> {
        let c = self.spectrum.coefficients();
        let mut d: Vec<f64> = Vec::with_capacity(c.len());
        d.extend(
            c[..n]
                .iter()
                .enumerate()
                .map(|(k, &v)| (mean.multiplier(n, k) - 1.0) * v),
        );
        d.extend(c[n..].iter().map(|&v| -v));
        // Orders are swept in parallel; keep each transform on one thread.
        fwht_sequential(&mut d);
        d
    }

    /// `‖mean_n f - f‖_p` for each `p` in `ps`, sharing one transform.
    pub fn approximation_errors(&self, mean: &MeanSpec, n: usize, ps: &[f64]) -> Result<Vec<f64>> {
        mean.check(n, self.resolution())?;
        for &p in ps {
            if p.is_nan() || p < 1.0 {
                return Err(Error::InvalidExponent(p));
            }
        }
        let d = self.error_values(mean, n);
        Ok(ps.iter().map(|&p| lp_norm_slice(&d, p)).collect())
    }

    pub fn approximation_error(&self, mean: &MeanSpec, n: usize, p: f64) -> Result<f64> {
        Ok(self.approximation_errors(mean, n, &[p])?[0])
    }

    /// Evaluates `theorem` at order `n` for each exponent in `ps`.
    ///
    /// `constant` is the user-supplied `C` for ratio-only theorems; it is
    /// ignored by the others.
    pub fn verify(
        &self,
        theorem: Theorem,
        n: usize,
        q: Option<&WeightSequence>,
        ps: &[f64],
        constant: Option<f64>,
    ) -> Result<Vec<BoundReport>> {
        let m = self.resolution().bits();
        let need_q =
            || q.ok_or_else(|| Error::Precondition(format!("theorem {theorem} needs weights")));
        if n == 0 {
            return Err(Error::OrderTooSmall { order: 0, min: 1 });
        }
        let big_n = highest_bit(n as u64)?;
        if big_n >= m {
            return Err(Error::Precondition(format!(
                "order {n} has N = {big_n} >= M = {m}; the modulus profile would be truncated"
            )));
        }
        let (mean, label) = match theorem {
            Theorem::Fejer => {
                if n < 2 {
                    return Err(Error::OrderTooSmall {
                        order: n as u64,
                        min: 2,
                    });
                }
                (MeanSpec::Fejer, "const".to_string())
            }
            Theorem::T1 => {
                let q = need_q()?;
                q.require(n)?;
                if !q.monotonicity_upto(n).is_non_decreasing() {
                    return Err(Error::Precondition(format!(
                        "t1 needs non-decreasing weights on [0, {n}); {} is not",
                        q.label()
                    )));
                }
                (MeanSpec::Norlund(q.clone()), q.label().to_string())
            }
            Theorem::T2 => {
                let q = need_q()?;
                if !n.is_power_of_two() {
                    return Err(Error::Precondition(format!(
                        "t2 needs a dyadic order, got {n}"
                    )));
                }
                q.require(n + 1)?;
                if !q.monotonicity_upto(n + 1).is_non_increasing() {
                    return Err(Error::Precondition(format!(
                        "t2 needs non-increasing weights on [0, {n}]; {} is not",
                        q.label()
                    )));
                }
                if q.q_unchecked(n) <= 0.0 {
                    return Err(Error::Precondition(format!(
                        "q_{n} = 0; the t2 bound is undefined"
                    )));
                }
                (MeanSpec::Norlund(q.clone()), q.label().to_string())
            }
            Theorem::T3 => {
                let q = need_q()?;
                q.require(n)?;
                if !q.monotonicity_upto(n).is_non_increasing() {
                    return Err(Error::Precondition(format!(
                        "t3 needs non-increasing weights on [0, {n}); {} is not",
                        q.label()
                    )));
                }
                (MeanSpec::Norlund(q.clone()), q.label().to_string())
            }
            Theorem::MoriczSiddiqi => {
                let q = need_q()?;
                if n < 2 {
                    return Err(Error::OrderTooSmall {
                        order: n as u64,
                        min: 2,
                    });
                }
                q.require(n)?;
                if q.monotonicity_upto(n) == Monotonicity::Neither {
                    return Err(Error::Precondition(format!(
                        "ms needs monotone weights on [0, {n}); {} is neither",
                        q.label()
                    )));
                }
                (MeanSpec::Norlund(q.clone()), q.label().to_string())
            }
        };
        let lhs = self.approximation_errors(&mean, n, ps)?;
        ps.iter()
            .zip(lhs)
            .map(|(&p, lhs)| {
                let omega = &self.profile(p)?.values;
                let structural = match theorem {
                    Theorem::Fejer => fejer_bound(omega, big_n),
                    Theorem::T1 => theorem1_bound(omega, n, big_n, need_q()?),
                    Theorem::T2 => theorem2_bound(omega, big_n, need_q()?),
                    Theorem::T3 => dyadic_average(omega, big_n),
                    Theorem::MoriczSiddiqi => moricz_siddiqi_bound(omega, n, need_q()?),
                };
                Ok(self.report(theorem, n, big_n, p, &label, lhs, structural, constant))
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn report(
        &self,
        theorem: Theorem,
        n: usize,
        big_n: u32,
        p: f64,
        label: &str,
        lhs: f64,
        structural: f64,
        constant: Option<f64>,
    ) -> BoundReport {
        let (rhs, ratio, impossible, holds) = if theorem.is_ratio_only() {
            let ratio = ratio_of(lhs, structural);
            let impossible = ratio == Some(f64::INFINITY);
            match constant {
                Some(c) => {
                    let rhs = c * structural;
                    (rhs, ratio, impossible, rhs - lhs >= -HOLD_TOLERANCE)
                }
                None => (structural, ratio, impossible, !impossible),
            }
        } else {
            let ratio = ratio_of(lhs, structural);
            (
                structural,
                ratio,
                false,
                structural - lhs >= -HOLD_TOLERANCE,
            )
        };
        BoundReport {
            theorem,
            function: self.name.clone(),
            n,
            big_n,
            p,
            weights: label.to_string(),
            lhs,
            rhs,
            margin: rhs - lhs,
            ratio,
            impossible,
            holds,
        }
    }

    /// Evaluates `theorem` over many orders; results are sorted by
    /// `(n, p)` regardless of scheduling.
    pub fn sweep(
        &self,
        theorem: Theorem,
        orders: &[usize],
        q: Option<&WeightSequence>,
        ps: &[f64],
        constant: Option<f64>,
    ) -> Result<Vec<BoundReport>> {
        let chunks = par::map_slice(orders, |&n| self.verify(theorem, n, q, ps, constant));
        let mut out = Vec::with_capacity(orders.len() * ps.len());
        for chunk in chunks {
            out.extend(chunk?);
        }
        out.sort_by(|a, b| a.n.cmp(&b.n).then(a.p.total_cmp(&b.p)));
        Ok(out)
    }
}

/// `Σ_{s≤N} 2^{s-N} ω_s`.
fn dyadic_average(omega: &[f64], big_n: u32) -> f64 {
    (0..=big_n)
        .map(|s| (f64::from(s) - f64::from(big_n)).exp2() * omega[s as usize])
        .sum()
}

fn fejer_bound(omega: &[f64], big_n: u32) -> f64 {
    3.0 * dyadic_average(omega, big_n)
}

/// `(18/Q_n) Σ_{i<N} 2^i q_{n-2^i} ω_i + 12 ω_N`.
fn theorem1_bound(omega: &[f64], n: usize, big_n: u32, q: &WeightSequence) -> f64 {
    let qn = q.prefix_unchecked(n);
    let sum: f64 = (0..big_n)
        .map(|i| {
            let step = 1usize << i;
            step as f64 * q.q_unchecked(n - step) * omega[i as usize]
        })
        .sum();
    18.0 / qn * sum + 12.0 * omega[big_n as usize]
}

/// For order `2^e`:
/// `Σ_{s<e} 2^{s-e} ω_s + 3 Σ_{s<e} (e-s) 2^{s-e} (q_{2^s}/q_{2^e}) ω_s + 3 ω_e`.
fn theorem2_bound(omega: &[f64], e: u32, q: &WeightSequence) -> f64 {
    let qe = q.q_unchecked(1usize << e);
    let mut total = 3.0 * omega[e as usize];
    for s in 0..e {
        let scale = (f64::from(s) - f64::from(e)).exp2();
        let w = omega[s as usize];
        total += scale * w;
        total += 3.0 * f64::from(e - s) * scale * q.q_unchecked(1usize << s) / qe * w;
    }
    total
}

/// Structural part of the earlier bound, without its constant `C_p`.
/// With `n = 2^j + k`, `1 ≤ k ≤ 2^j`:
/// non-decreasing weights: `(1/Q_n) Σ_{i<j} 2^i q_{n-2^i} ω_i + ω_j`;
/// non-increasing weights: `(1/Q_n) Σ_{i<j} (Q_{n-2^i+1} - Q_{n-2^{i+1}+1}) ω_i + ω_j`.
fn moricz_siddiqi_bound(omega: &[f64], n: usize, q: &WeightSequence) -> f64 {
    let j = highest_bit((n - 1) as u64).unwrap_or(0);
    let qn = q.prefix_unchecked(n);
    let increasing = q.monotonicity_upto(n).is_non_decreasing();
    let sum: f64 = (0..j)
        .map(|i| {
            let step = 1usize << i;
            let weight = if increasing {
                step as f64 * q.q_unchecked(n - step)
            } else {
                q.prefix_unchecked(n - step + 1) - q.prefix_unchecked(n - 2 * step + 1)
            };
            weight * omega[i as usize]
        })
        .sum();
    sum / qn + omega[j as usize]
}

pub fn verify_fejer_estimate(f: &StepFunction, p: f64, n: usize) -> Result<BoundReport> {
    single(f, Theorem::Fejer, n, None, p, None)
}

pub fn verify_theorem1(
    f: &StepFunction,
    p: f64,
    n: usize,
    q: &WeightSequence,
) -> Result<BoundReport> {
    single(f, Theorem::T1, n, Some(q), p, None)
}

/// Order `2^exponent`.
pub fn verify_theorem2(
    f: &StepFunction,
    p: f64,
    exponent: u32,
    q: &WeightSequence,
) -> Result<BoundReport> {
    if exponent >= usize::BITS - 1 {
        return Err(Error::Precondition(format!(
            "exponent {exponent} too large"
        )));
    }
    single(f, Theorem::T2, 1usize << exponent, Some(q), p, None)
}

pub fn verify_theorem3(
    f: &StepFunction,
    p: f64,
    n: usize,
    q: &WeightSequence,
    constant: Option<f64>,
) -> Result<BoundReport> {
    single(f, Theorem::T3, n, Some(q), p, constant)
}

pub fn verify_moricz_siddiqi(
    f: &StepFunction,
    p: f64,
    n: usize,
    q: &WeightSequence,
) -> Result<BoundReport> {
    single(f, Theorem::MoriczSiddiqi, n, Some(q), p, None)
}

fn single(
    f: &StepFunction,
    theorem: Theorem,
    n: usize,
    q: Option<&WeightSequence>,
    p: f64,
    constant: Option<f64>,
) -> Result<BoundReport> {
    let subject = Subject::new("f", f.clone(), &[p])?;
    Ok(subject
        .verify(theorem, n, q, &[p], constant)?
        .pop()
        .expect("one report per exponent"))
}

/// Aggregate of a sweep, emitted as the JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub theorem: Theorem,
    pub cells: usize,
    pub holding: usize,
    pub all_hold: bool,
    pub min_margin: f64,
    /// Largest `lhs/rhs` (or `lhs/structural sum` for ratio-only theorems).
    pub sup_ratio: Option<f64>,
    pub sup_ratio_order: Option<usize>,
    pub impossible: usize,
}

pub fn summarize(theorem: Theorem, reports: &[BoundReport]) -> SweepSummary {
    let mut sup: Option<(f64, usize)> = None;
    for r in reports {
        if let Some(x) = r.ratio {
            if sup.is_none_or(|(s, _)| x > s) {
                sup = Some((x, r.n));
            }
        }
    }
    let holding = reports.iter().filter(|r| r.holds).count();
    SweepSummary {
        theorem,
        cells: reports.len(),
        holding,
        all_hold: holding == reports.len(),
        min_margin: reports
            .iter()
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min),
        sup_ratio: sup.map(|s| s.0),
        sup_ratio_order: sup.map(|s| s.1),
        impossible: reports.iter().filter(|r| r.impossible).count(),
    }
}

/// Condition evidence reported alongside a weighted sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionEvidence {
    pub weights: String,
    pub monotonicity: Monotonicity,
    /// `q_{n-1}/Q_n → 0`.
    pub regularity: Option<bool>,
    /// `n/Q_n` bounded.
    pub linear_growth: BoundednessEvidence,
    /// `n q_{n-1}/Q_n` bounded.
    pub last_weight: BoundednessEvidence,
    /// `c_n` of the γ-moment condition at `γ = 2`.
    pub moment_condition: BoundednessEvidence,
}

pub fn condition_evidence(q: &WeightSequence, horizon: usize) -> Result<ConditionEvidence> {
    let regularity = if horizon >= 2 {
        Some(weights::is_regular(q, horizon, weights::DEFAULT_REGULARITY_THRESHOLD)?.regular)
    } else {
        None
    };
    Ok(ConditionEvidence {
        weights: q.label().to_string(),
        monotonicity: q.monotonicity_upto(horizon),
        regularity,
        linear_growth: weights::linear_growth_condition(q, horizon)?,
        last_weight: weights::last_weight_condition(q, horizon)?,
        moment_condition: weights::moricz_siddiqi_condition(q, 2.0, horizon.max(2))?.evidence,
    })
}

/// Predicted decay of `‖t_n f - f‖_p` for `f ∈ lip(α, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateRegime {
    /// `O(n^{-α})`, `0 < α < 1`.
    Power,
    /// `O(n^{-1} log n)`, `α = 1`.
    LogLinear,
    /// `O(n^{-1})`, `α > 1`.
    Linear,
}

impl RateRegime {
    pub fn for_alpha(alpha: f64) -> Self {
        if alpha < 1.0 {
            Self::Power
        } else if alpha == 1.0 {
            Self::LogLinear
        } else {
            Self::Linear
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub alpha: f64,
    pub p: f64,
    pub mean: String,
    /// Orders kept for the fit (strictly increasing).
    pub orders: Vec<usize>,
    pub errors: Vec<f64>,
    /// Orders whose error fell below the underflow floor.
    pub dropped: Vec<usize>,
    pub fit: RateFit,
    pub regime: RateRegime,
    /// `-α` or `-1`; `None` in the log-linear regime.
    pub expected_slope: Option<f64>,
    /// `max/min` of `error·n/log2 n` over the upper half of the orders.
    pub log_normalized_spread: Option<f64>,
    pub consistent: bool,
}

/// Measures `‖mean_n f - f‖_p` over `orders` and fits the decay exponent.
pub fn rate_experiment(
    f: &StepFunction,
    alpha: f64,
    p: f64,
    mean: &MeanSpec,
    orders: &[usize],
) -> Result<RateReport> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} must be positive"
        )));
    }
    if orders.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(
            "orders must be strictly increasing".into(),
        ));
    }
    let subject = Subject::new("f", f.clone(), &[])?;
    let errors = par::map_slice(orders, |&n| subject.approximation_error(mean, n, p))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut kept = Vec::new();
    let mut kept_err = Vec::new();
    let mut dropped = Vec::new();
    for (&n, &e) in orders.iter().zip(&errors) {
        if e < UNDERFLOW_FLOOR {
            dropped.push(n);
        } else {
            kept.push(n);
            kept_err.push(e);
        }
    }
    if kept.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{} usable points after dropping {} below {UNDERFLOW_FLOOR:e}",
            kept.len(),
            dropped.len()
        )));
    }
    let xs: Vec<f64> = kept.iter().map(|&n| n as f64).collect();
    let fit = rate_fit(&xs, &kept_err)?;
    let regime = RateRegime::for_alpha(alpha);
    let (expected_slope, log_normalized_spread, consistent) = match regime {
        RateRegime::Power | RateRegime::Linear => {
            let e = if regime == RateRegime::Power {
                -alpha
            } else {
                -1.0
            };
            (Some(e), None, (fit.slope - e).abs() <= SLOPE_TOLERANCE)
        }
        RateRegime::LogLinear => {
            let upper = kept.len() / 2;
            let normalized: Vec<f64> = kept[upper..]
                .iter()
                .zip(&kept_err[upper..])
                .map(|(&n, &e)| e * n as f64 / (n as f64).log2())
                .collect();
            let max = normalized.iter().copied().fold(f64::MIN, f64::max);
            let min = normalized.iter().copied().fold(f64::MAX, f64::min);
            let spread = max / min;
            (None, Some(spread), spread <= LOG_REGIME_SPREAD)
        }
    };
    Ok(RateReport {
        alpha,
        p,
        mean: mean.label(),
        orders: kept,
        errors: kept_err,
        dropped,
        fit,
        regime,
        expected_slope,
        log_normalized_spread,
        consistent,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SaturationReport {
    pub p: f64,
    pub depths: Vec<u32>,
    /// `2^n ‖σ_{2^n} f - f‖_p`.
    pub products: Vec<f64>,
    pub all_zero: bool,
    /// Non-constant `f`: products stay above zero without decaying.
    pub bounded_away_from_zero: Option<bool>,
}

pub fn saturation_check(f: &StepFunction, p: f64, depths: &[u32]) -> Result<SaturationReport> {
    let m = f.resolution().bits();
    if let Some(&d) = depths.iter().find(|&&d| d >= m) {
        return Err(Error::DepthTooLarge {
            depth: d,
            resolution: m,
        });
    }
    let subject = Subject::new("f", f.clone(), &[])?;
    let products = depths
        .iter()
        .map(|&d| {
            let n = 1usize << d;
            Ok(n as f64 * subject.approximation_error(&MeanSpec::Fejer, n, p)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let all_zero = products.iter().all(|&x| x < UNDERFLOW_FLOOR);
    let bounded_away_from_zero = if f.is_constant() {
        None
    } else {
        let min = products.iter().copied().fold(f64::INFINITY, f64::min);
        let decaying = if products.len() >= 3 && min > 0.0 {
            let xs: Vec<f64> = depths.iter().map(|&d| f64::from(d).exp2()).collect();
            rate_fit(&xs, &products)?.slope < -weights::DEFAULT_GROWTH_THRESHOLD
        } else {
            false
        };
        Some(min > UNDERFLOW_FLOOR && !decaying)
    };
    Ok(SaturationReport {
        p,
        depths: depths.to_vec(),
        products,
        all_zero,
        bounded_away_from_zero,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub p: f64,
    pub mean: String,
    pub orders: Vec<usize>,
    pub errors: Vec<f64>,
    /// `max_{j≥i} errors[j]`, non-increasing by construction.
    pub envelope: Vec<f64>,
    pub first_quartile_max: f64,
    pub top_quartile_max: f64,
    /// Envelope at least halves between the first and last quartile, or the
    /// error reaches the floor.
    pub converging: bool,
}

pub fn convergence_check(
    f: &StepFunction,
    p: f64,
    mean: &MeanSpec,
    orders: &[usize],
) -> Result<ConvergenceReport> {
    if orders.len() < 4 {
        return Err(Error::Degenerate(format!(
            "{} orders, need at least 4",
            orders.len()
        )));
    }
    let subject = Subject::new("f", f.clone(), &[])?;
    let errors = par::map_slice(orders, |&n| subject.approximation_error(mean, n, p))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut envelope = errors.clone();
    for i in (0..envelope.len() - 1).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }
    let q = errors.len() / 4;
    let first_quartile_max = errors[..q.max(1)].iter().copied().fold(0.0, f64::max);
    let top_quartile_max = errors[errors.len() - q.max(1)..]
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let converging =
        top_quartile_max < UNDERFLOW_FLOOR || top_quartile_max <= 0.5 * first_quartile_max;
    Ok(ConvergenceReport {
        p,
        mean: mean.label(),
        orders: orders.to_vec(),
        errors,
        envelope,
        first_quartile_max,
        top_quartile_max,
        converging,
    })
}

pub const MATRIX_ALPHAS: [f64; 4] = [0.3, 0.5, 1.0, 2.0];

/// Built-in test functions: `w_k` for `k < 8` and Lipschitz generators for
/// each `α` in [`MATRIX_ALPHAS`], lacunary and random-sign.
pub fn builtin_functions(resolution: Resolution, seed: u64) -> Result<Vec<(String, StepFunction)>> {
    let mut out = Vec::new();
    for k in 0..8usize.min(resolution.size()) {
        out.push((format!("walsh:{k}"), walsh_function(k, resolution)?));
    }
    for alpha in MATRIX_ALPHAS {
        for variant in [LipVariant::Lacunary, LipVariant::Random] {
            out.push((
                format!("lip:{alpha}:{variant}:{seed}"),
                lip_generator(alpha, resolution, variant, seed)?,
            ));
        }
    }
    Ok(out)
}

/// Non-decreasing weights `q_k = e^{⌊√k⌋}`: flat runs broken by isolated
/// jumps at perfect squares. Regular, yet `c_n` of the γ-moment condition
/// grows like `√n`.
pub fn jump_weights(horizon: usize) -> Vec<f64> {
    (0..horizon)
        .map(|k| ((k as f64).sqrt().floor()).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::{norlund_mean, MeanMethod};
    use crate::metrics::lp_norm;
    use crate::weights::weight_family;

    fn res(m: u32) -> Resolution {
        Resolution::new(m).unwrap()
    }

    fn q(spec: &str, h: usize) -> WeightSequence {
        weight_family(&spec.parse().unwrap(), h).unwrap()
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.id().parse::<Theorem>().unwrap(), t);
        }
        assert!("t4".parse::<Theorem>().is_err());
    }

    #[test]
    fn fast_error_matches_direct_mean() {
        let f = lip_generator(0.5, res(7), LipVariant::Random, 5).unwrap();
        let subject = Subject::new("f", f.clone(), &[]).unwrap();
        let weights = q("poly:1", 128);
        for n in [1, 5, 64, 100, 128] {
            let t = norlund_mean(&f, n, &weights, MeanMethod::PartialSum).unwrap();
            let direct = lp_norm(&t.values.sub(&f).unwrap(), 2.0).unwrap();
            let fast = subject
                .approximation_error(&MeanSpec::Norlund(weights.clone()), n, 2.0)
                .unwrap();
            assert!((direct - fast).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn fejer_estimate_examples() {
        let r = res(6);
        let c = StepFunction::constant(r, 2.0);
        let rep = verify_fejer_estimate(&c, 2.0, 10).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));
        assert!(rep.holds);

        // σ_4 w_1 = (3/4) w_1; ω_0 = 2 and ω_s = 0 for s ≥ 1.
        let w1 = walsh_function(1, r).unwrap();
        let rep = verify_fejer_estimate(&w1, 2.0, 4).unwrap();
        assert!((rep.lhs - 0.25).abs() < 1e-12);
        assert!((rep.rhs - 1.5).abs() < 1e-12);
        assert!(rep.holds);
        assert_eq!(rep.big_n, 2);

        assert!(verify_fejer_estimate(&w1, 2.0, 1).is_err());
        assert!(verify_fejer_estimate(&w1, 2.0, 64).is_err());
    }

    #[test]
    fn theorem1_examples() {
        let r = res(8);
        let c = StepFunction::constant(r, -1.0);
        let rep = verify_theorem1(&c, 1.0, 37, &q("const", 256)).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));
        assert!(rep.holds);

        let f = lip_generator(0.5, r, LipVariant::Lacunary, 0).unwrap();
        let rep = verify_theorem1(&f, 2.0, 100, &q("poly:1", 256)).unwrap();
        assert_eq!(rep.big_n, 6);
        assert!(rep.holds && rep.lhs > 0.0);

        assert!(matches!(
            verify_theorem1(&f, 2.0, 100, &q("poly:-1", 256)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn theorem2_examples() {
        let r = res(10);
        let f = lip_generator(1.0, r, LipVariant::Lacunary, 0).unwrap();
        let rep = verify_theorem2(&f, 1.0, 8, &q("poly:-0.5", 1024)).unwrap();
        assert_eq!(rep.n, 256);
        assert!(rep.holds);
        let c = StepFunction::constant(r, 4.0);
        let rep = verify_theorem2(&c, 1.0, 5, &q("const", 1024)).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));
        assert!(verify_theorem2(&f, 1.0, 8, &q("poly:1", 1024)).is_err());
        let zero_tail = WeightSequence::from_values("x", vec![1.0, 0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(verify_theorem2(&f, 1.0, 2, &zero_tail).is_err());
        assert!(verify_theorem2(&f, 1.0, 10, &q("const", 2048)).is_err());
    }

    #[test]
    fn theorem3_ratio_and_constant() {
        let r = res(9);
        let f = lip_generator(0.5, r, LipVariant::Random, 2).unwrap();
        let weights = q("poly:-0.5", 512);
        let a = verify_theorem3(&f, 2.0, 77, &weights, None).unwrap();
        let b = verify_theorem3(&f.scaled(2.0), 2.0, 77, &weights, None).unwrap();
        let (ra, rb) = (a.ratio.unwrap(), b.ratio.unwrap());
        assert!(ra.is_finite() && (ra - rb).abs() < 1e-12);
        assert!(a.holds);
        let tight = verify_theorem3(&f, 2.0, 77, &weights, Some(ra * 0.5)).unwrap();
        assert!(!tight.holds);
        let loose = verify_theorem3(&f, 2.0, 77, &weights, Some(ra * 2.0)).unwrap();
        assert!(loose.holds);

        let c = verify_theorem3(&StepFunction::constant(r, 1.0), 2.0, 77, &weights, None).unwrap();
        assert_eq!(c.ratio, None);
        assert!(c.holds && !c.impossible);
    }

    #[test]
    fn moricz_siddiqi_examples() {
        let r = res(9);
        let f = lip_generator(0.5, r, LipVariant::Lacunary, 0).unwrap();
        let subject = Subject::new("f", f, &[2.0]).unwrap();
        let c = q("const", 512);
        for n in [2, 3, 96, 255] {
            let ms = &subject
                .verify(Theorem::MoriczSiddiqi, n, Some(&c), &[2.0], None)
                .unwrap()[0];
            // For constant weights both structural forms reduce to
            // (1/n) Σ_{i<j} 2^i ω_i + ω_j.
            let omega = &subject.profile(2.0).unwrap().values;
            let j = highest_bit((n - 1) as u64).unwrap();
            let expected = (0..j)
                .map(|i| (1 << i) as f64 * omega[i as usize])
                .sum::<f64>()
                / n as f64
                + omega[j as usize];
            assert!((ms.rhs - expected).abs() < 1e-12);
        }
        let rep = &subject
            .verify(
                Theorem::MoriczSiddiqi,
                96,
                Some(&q("poly:1", 512)),
                &[2.0],
                None,
            )
            .unwrap()[0];
        assert!(rep.ratio.unwrap().is_finite());
    }

    #[test]
    fn sweep_is_sorted_and_complete() {
        let f = lip_generator(1.0, res(8), LipVariant::Random, 1).unwrap();
        let subject = Subject::new("lip", f, &[1.0, 2.0]).unwrap();
        let orders: Vec<usize> = (1..=128).rev().collect();
        let reps = subject
            .sweep(
                Theorem::T1,
                &orders,
                Some(&q("poly:2", 256)),
                &[2.0, 1.0],
                None,
            )
            .unwrap();
        assert_eq!(reps.len(), 256);
        assert!(reps.windows(2).all(|w| (w[0].n, w[0].p) < (w[1].n, w[1].p)));
        let summary = summarize(Theorem::T1, &reps);
        assert!(summary.all_hold);
        assert!(summary.sup_ratio.unwrap() <= 1.0);
    }

    #[test]
    fn missing_profile_is_an_error() {
        let subject = Subject::new("f", StepFunction::constant(res(3), 1.0), &[1.0]).unwrap();
        assert!(subject
            .verify(Theorem::Fejer, 2, None, &[2.0], None)
            .is_err());
    }

    #[test]
    fn rate_experiment_constant_function_underflows() {
        let c = StepFunction::constant(res(8), 1.0);
        let orders: Vec<usize> = (2..=7).map(|k| 1 << k).collect();
        assert!(matches!(
            rate_experiment(&c, 0.5, 2.0, &MeanSpec::Fejer, &orders),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn saturation_examples() {
        let r = res(10);
        let c = saturation_check(&StepFunction::constant(r, 3.0), 2.0, &[1, 2, 3, 4]).unwrap();
        assert!(c.all_zero);
        assert_eq!(c.bounded_away_from_zero, None);

        // σ_{2^n} w_1 = (1 - 2^{-n}) w_1, so every product is exactly 1.
        let w1 = walsh_function(1, r).unwrap();
        let s = saturation_check(&w1, 2.0, &(1..10).collect::<Vec<_>>()).unwrap();
        assert!(s.products.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert_eq!(s.bounded_away_from_zero, Some(true));

        assert!(saturation_check(&w1, 2.0, &[10]).is_err());
    }

    #[test]
    fn convergence_examples() {
        let r = res(8);
        let f = lip_generator(0.5, r, LipVariant::Lacunary, 0).unwrap();
        let orders: Vec<usize> = (1..=128).collect();
        let rep = convergence_check(&f, 1.0, &MeanSpec::Fejer, &orders).unwrap();
        assert!(rep.converging);
        assert!(rep.envelope.windows(2).all(|w| w[1] <= w[0]));

        let full = lip_generator(0.3, r, LipVariant::Random, 9)
            .unwrap()
            .map(|v| v * v);
        let orders: Vec<usize> = (1..=256).collect();
        let rep = convergence_check(&full, 2.0, &MeanSpec::PartialSums, &orders).unwrap();
        assert!(*rep.errors.last().unwrap() < 1e-12);
    }

    #[test]
    fn jump_weights_are_regular_but_violate_moment_condition() {
        let jw = WeightSequence::from_values("jump", jump_weights(1 << 14)).unwrap();
        assert!(jw.monotonicity().is_non_decreasing());
        let ev = condition_evidence(&jw, 1 << 14).unwrap();
        assert!(!ev.moment_condition.bounded);
        assert!(ev.moment_condition.growth_slope > 0.3);
        let reg = weights::is_regular(&jw, 1 << 14, weights::DEFAULT_REGULARITY_THRESHOLD).unwrap();
        assert!(reg.tail_ratio < 0.01);
    }
}
