//! `L^p` norms, the dyadic modulus of continuity, and Lipschitz-class test
//! functions.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dyadic::{Resolution, StepFunction};
use crate::error::{Error, Result};
use crate::par;

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `|x|^p` with the common exponents special-cased.
#[inline]
fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else if p == 3.0 {
        a * a * a
    } else {
        a.powf(p)
    }
}

/// `(2^{-M} Σ |v_j|^p)^{1/p}` for finite `p`, max-abs for `p = ∞`.
pub(crate) fn lp_norm_slice(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let mean = values.iter().map(|&v| abs_pow(v, p)).sum::<f64>() / values.len() as f64;
    root(mean, p)
}

#[inline]
fn root(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / p)
    }
}

pub fn lp_norm(f: &StepFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_norm_slice(f.values(), p))
}

/// `‖f(· + t) - f‖_p` for the translation by atom `t`.
fn translation_increment(values: &[f64], t: usize, p: f64) -> f64 {
    if t == 0 {
        return 0.0;
    }
    // j and j ^ t contribute the same term; visit each pair once through
    // the representative with the top bit of t cleared.
    let top = 1usize << (usize::BITS - 1 - t.leading_zeros());
    let size = values.len();
    if p.is_infinite() {
        let mut m = 0.0f64;
        for start in (0..size).step_by(2 * top) {
            for j in start..start + top {
                m = m.max((values[j ^ t] - values[j]).abs());
            }
        }
        return m;
    }
    let mut sum = 0.0;
    for start in (0..size).step_by(2 * top) {
        for j in start..start + top {
            sum += abs_pow(values[j ^ t] - values[j], p);
        }
    }
    root(2.0 * sum / size as f64, p)
}

/// `ω_p(2^{-k}, f) = max_{t ∈ I_k} ‖f(· + t) - f‖_p`.
pub fn modulus(f: &StepFunction, p: f64, k: u32) -> Result<f64> {
    check_exponent(p)?;
    let resolution = f.resolution();
    resolution.check_depth(k)?;
    let count = 1usize << (resolution.bits() - k);
    let increments = par::map_range(count, |i| translation_increment(f.values(), i << k, p));
    Ok(increments.into_iter().fold(0.0, f64::max))
}

/// `ω_p(2^{-k}, f)` for `k = 0..=M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusProfile {
    pub p: f64,
    pub resolution: Resolution,
    pub values: Vec<f64>,
}

impl ModulusProfile {
    pub fn omega(&self, k: u32) -> f64 {
        self.values[k as usize]
    }
}

/// Whole profile in one pass over all `2^M` translations.
pub fn modulus_profile(f: &StepFunction, p: f64) -> Result<ModulusProfile> {
    check_exponent(p)?;
    let resolution = f.resolution();
    let m = resolution.bits();
    let increments = par::map_range(resolution.size(), |t| {
        translation_increment(f.values(), t, p)
    });
    let mut values = vec![0.0f64; m as usize + 1];
    for (t, &d) in increments.iter().enumerate() {
        // t lies in I_k exactly for k <= trailing_zeros(t).
        let deepest = if t == 0 { m } else { t.trailing_zeros().min(m) };
        values[deepest as usize] = values[deepest as usize].max(d);
    }
    for k in (0..m as usize).rev() {
        values[k] = values[k].max(values[k + 1]);
    }
    Ok(ModulusProfile {
        p,
        resolution,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LipVariant {
    /// All signs `+1`.
    Lacunary,
    /// Signs drawn from ChaCha8 seeded with the given seed.
    Random,
}

impl FromStr for LipVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lacunary" => Ok(Self::Lacunary),
            "random" => Ok(Self::Random),
            _ => Err(Error::Parse(format!("unknown lip variant '{s}'"))),
        }
    }
}

impl fmt::Display for LipVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lacunary => "lacunary",
            Self::Random => "random",
        })
    }
}

/// `f = Σ_{m<M} 2^{-αm} ε_m w_{2^m}`, whose modulus decays like `2^{-αk}`.
pub fn lip_generator(
    alpha: f64,
    resolution: Resolution,
    variant: LipVariant,
    seed: u64,
) -> Result<StepFunction> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} must be positive"
        )));
    }
    let m = resolution.bits();
    let signs: Vec<f64> = match variant {
        LipVariant::Lacunary => vec![1.0; m as usize],
        LipVariant::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..m)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect()
        }
    };
    let amps: Vec<f64> = (0..m)
        .map(|i| signs[i as usize] * (-alpha * f64::from(i)).exp2())
        .collect();
    // w_{2^i}(j) = (-1)^{j_i}.
    let values = (0..resolution.size())
        .map(|j| {
            amps.iter()
                .enumerate()
                .map(|(i, a)| if (j >> i) & 1 == 0 { *a } else { -*a })
                .sum()
        })
        .collect();
    Ok(StepFunction::from_raw(resolution, values))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares of `log2 y` against `log2 x`.
pub fn rate_fit(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{} points, need at least 3",
            xs.len()
        )));
    }
    if let Some(i) = ys.iter().position(|&y| y.is_nan() || y <= 0.0) {
        return Err(Error::Degenerate(format!(
            "non-positive value {} at point {i}",
            ys[i]
        )));
    }
    if let Some(i) = xs.iter().position(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::Degenerate(format!(
            "non-positive order {} at point {i}",
            xs[i]
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.log2()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.log2()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all orders identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(RateFit {
        slope,
        intercept,
        r2,
    })
}
