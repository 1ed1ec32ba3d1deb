//! Fejér means `σ_n f`, Nörlund means `t_n f`, and dyadic convolution.
//!
//! `t_n f` can be computed three ways that share no arithmetic beyond the
//! Walsh coefficients of `f`:
//!
//! * partial sums: `(1/Q_n) Σ_{k=1}^n q_{n-k} S_k f`;
//! * convolution with the Nörlund kernel: `f * F_n`;
//! * summation by parts through Fejér means:
//!   `(1/Q_n)(Σ_{j=1}^{n-1} (q_{n-j} - q_{n-j-1}) j σ_j f + q_0 n σ_n f)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dyadic::{Resolution, StepFunction};
use crate::error::{Error, Result};
use crate::kernels::norlund_kernel;
use crate::transform::{analyze, synthesize, walsh_sign};
use crate::weights::WeightSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanMethod {
    PartialSum,
    Convolution,
    Abel,
}

impl MeanMethod {
    pub const ALL: [MeanMethod; 3] = [Self::PartialSum, Self::Convolution, Self::Abel];
}

impl FromStr for MeanMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partial-sum" => Ok(Self::PartialSum),
            "convolution" => Ok(Self::Convolution),
            "abel" => Ok(Self::Abel),
            _ => Err(Error::Parse(format!("unknown mean method '{s}'"))),
        }
    }
}

impl fmt::Display for MeanMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PartialSum => "partial-sum",
            Self::Convolution => "convolution",
            Self::Abel => "abel",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanResult {
    pub order: usize,
    pub resolution: Resolution,
    pub values: StepFunction,
    pub method: MeanMethod,
}

/// `(f * g)(x) = ∫ f(t) g(x + t) dμ(t)`, via the Walsh spectra.
pub fn convolve(f: &StepFunction, g: &StepFunction) -> Result<StepFunction> {
    f.resolution().check_same(g.resolution())?;
    let fg = analyze(f);
    let gg = analyze(g);
    let product = fg.multiplied(|k| gg.coefficients()[k]);
    Ok(synthesize(&product))
}

fn check_mean_order(n: usize, resolution: Resolution) -> Result<()> {
    if n == 0 {
        return Err(Error::OrderTooSmall { order: 0, min: 1 });
    }
    resolution.check_order(n)
}

/// `σ_n f = (1/n) Σ_{k=1}^n S_k f`.
pub fn fejer_mean(f: &StepFunction, n: usize) -> Result<StepFunction> {
    check_mean_order(n, f.resolution())?;
    let nf = n as f64;
    let s = analyze(f).multiplied(|k| if k < n { (nf - k as f64) / nf } else { 0.0 });
    Ok(synthesize(&s))
}

/// Running partial sums `S_1 f, …, S_n f` handed to `visit(k, S_k f)`.
fn for_each_partial_sum(f: &StepFunction, n: usize, mut visit: impl FnMut(usize, &[f64])) {
    let coeffs = analyze(f);
    let mut s = vec![0.0; f.resolution().size()];
    for k in 1..=n {
        let c = coeffs.coefficients()[k - 1];
        if c != 0.0 {
            for (j, v) in s.iter_mut().enumerate() {
                *v += c * walsh_sign(k - 1, j);
            }
        }
        visit(k, &s);
    }
}

pub fn norlund_mean(
    f: &StepFunction,
    n: usize,
    q: &WeightSequence,
    method: MeanMethod,
) -> Result<MeanResult> {
    let resolution = f.resolution();
    check_mean_order(n, resolution)?;
    q.require(n)?;
    let qn = q.prefix_unchecked(n);
    let values = match method {
        MeanMethod::PartialSum => {
            let mut acc = vec![0.0; resolution.size()];
            for_each_partial_sum(f, n, |k, s| {
                let w = q.q_unchecked(n - k);
                acc.iter_mut().zip(s).for_each(|(a, v)| *a += w * v);
            });
            acc.iter_mut().for_each(|a| *a /= qn);
            StepFunction::from_raw(resolution, acc)
        }
        MeanMethod::Convolution => convolve(f, &norlund_kernel(q, n, resolution)?)?,
        MeanMethod::Abel => {
            // k σ_k f is the running sum of S_1 f..S_k f.
            let size = resolution.size();
            let mut running = vec![0.0; size];
            let mut acc = vec![0.0; size];
            for_each_partial_sum(f, n, |k, s| {
                running.iter_mut().zip(s).for_each(|(r, v)| *r += v);
                let w = if k < n {
                    q.q_unchecked(n - k) - q.q_unchecked(n - k - 1)
                } else {
                    q.q_unchecked(0)
                };
                if w != 0.0 {
                    acc.iter_mut().zip(&running).for_each(|(a, r)| *a += w * r);
                }
            });
            acc.iter_mut().for_each(|a| *a /= qn);
            StepFunction::from_raw(resolution, acc)
        }
    };
    Ok(MeanResult {
        order: n,
        resolution,
        values,
        method,
    })
}
