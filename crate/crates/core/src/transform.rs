//! Walsh–Paley analysis and synthesis.
//!
//! With the LSB-first coordinate convention, `w_n(x) = (-1)^{popcount(n & j)}`
//! for `x` the atom `j`, so the natural-order Hadamard butterfly produces
//! Paley-ordered coefficients without any bit reversal.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dyadic::{Resolution, StepFunction};
use crate::error::{Error, Result};

/// Stages with half-width below this run entirely inside one cache block.
const BLOCK: usize = 1 << 11;

#[cfg(feature = "parallel")]
const PAR_MIN_LEN: usize = 1 << 14;

#[inline]
fn butterfly(lo: &mut [f64], hi: &mut [f64]) {
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x + y;
        *b = x - y;
    }
}

/// All stages with half-width `< limit` on one block.
fn fwht_block(block: &mut [f64], limit: usize) {
    let mut h = 1;
    while h < limit && h < block.len() {
        for chunk in block.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            butterfly(lo, hi);
        }
        h *= 2;
    }
}

/// Unnormalized in-place Walsh–Hadamard transform, single-threaded.
///
/// `data[k] <- Σ_j data[j]·(-1)^{popcount(k & j)}`. Length must be a power
/// of two.
pub fn fwht_sequential(data: &mut [f64]) {
    assert!(
        data.len().is_power_of_two(),
        "length must be a power of two"
    );
    let n = data.len();
    for block in data.chunks_mut(BLOCK.min(n)) {
        fwht_block(block, BLOCK);
    }
    let mut h = BLOCK;
    while h < n {
        for chunk in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            butterfly(lo, hi);
        }
        h *= 2;
    }
}

/// Unnormalized in-place Walsh–Hadamard transform.
///
/// Splits independent butterfly blocks across the rayon pool when the
/// `parallel` feature is on and the input is large. Every output element is
/// produced by the same sequence of additions as [`fwht_sequential`], so the
/// two agree bit for bit.
pub fn fwht(data: &mut [f64]) {
    #[cfg(feature = "parallel")]
    {
        if data.len() >= PAR_MIN_LEN {
            return fwht_parallel(data);
        }
    }
    fwht_sequential(data)
}

#[cfg(feature = "parallel")]
fn fwht_parallel(data: &mut [f64]) {
    assert!(
        data.len().is_power_of_two(),
        "length must be a power of two"
    );
    let n = data.len();
    data.par_chunks_mut(BLOCK)
        .for_each(|block| fwht_block(block, BLOCK));
    let mut h = BLOCK;
    while h < n {
        data.par_chunks_exact_mut(2 * h).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(h);
            lo.par_chunks_mut(BLOCK)
                .zip(hi.par_chunks_mut(BLOCK))
                .for_each(|(a, b)| butterfly(a, b));
        });
        h *= 2;
    }
}

/// Walsh–Paley coefficients `f̂(0..2^M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    resolution: Resolution,
    coefficients: Vec<f64>,
}

impl Spectrum {
    pub fn new(resolution: Resolution, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != resolution.size() {
            return Err(Error::LengthMismatch {
                expected: resolution.size(),
                found: coefficients.len(),
            });
        }
        if let Some(pos) = coefficients.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self {
            resolution,
            coefficients,
        })
    }

    pub(crate) fn from_raw(resolution: Resolution, coefficients: Vec<f64>) -> Self {
        Self {
            resolution,
            coefficients,
        }
    }

    pub fn unit(resolution: Resolution, k: usize) -> Result<Self> {
        check_frequency(k, resolution)?;
        let mut c = vec![0.0; resolution.size()];
        c[k] = 1.0;
        Ok(Self::from_raw(resolution, c))
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `f̂(k)`; zero for every `k >= 2^M`.
    pub fn coefficient(&self, k: usize) -> f64 {
        self.coefficients.get(k).copied().unwrap_or(0.0)
    }

    /// `Σ_k f̂(k)²`.
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// Keeps frequencies `< n`.
    pub fn truncated(&self, n: usize) -> Result<Spectrum> {
        self.resolution.check_order(n)?;
        let mut c = self.coefficients.clone();
        c[n..].iter_mut().for_each(|v| *v = 0.0);
        Ok(Self::from_raw(self.resolution, c))
    }

    /// Coefficient-wise product with a multiplier sequence `λ(k)`.
    pub fn multiplied(&self, multiplier: impl Fn(usize) -> f64) -> Spectrum {
        let c = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, &v)| v * multiplier(k))
            .collect();
        Self::from_raw(self.resolution, c)
    }
}

fn check_frequency(n: usize, resolution: Resolution) -> Result<()> {
    if n >= resolution.size() {
        Err(Error::IndexOutOfRange {
            index: n as u64,
            resolution: resolution.bits(),
        })
    } else {
        Ok(())
    }
}

/// `w_n` as a step function: `(-1)^{popcount(n & j)}` on atom `j`.
pub fn walsh_function(n: usize, resolution: Resolution) -> Result<StepFunction> {
    check_frequency(n, resolution)?;
    let values = (0..resolution.size()).map(|j| walsh_sign(n, j)).collect();
    Ok(StepFunction::from_raw(resolution, values))
}

#[inline]
pub(crate) fn walsh_sign(n: usize, j: usize) -> f64 {
    if (n & j).count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `f̂(k) = 2^{-M} Σ_j f(j) w_k(j)`.
pub fn analyze(f: &StepFunction) -> Spectrum {
    let mut c = f.values().to_vec();
    fwht(&mut c);
    let scale = 1.0 / c.len() as f64;
    c.iter_mut().for_each(|v| *v *= scale);
    Spectrum::from_raw(f.resolution(), c)
}

/// `Σ_k s[k] w_k`, unnormalized inverse of [`analyze`].
pub fn synthesize(s: &Spectrum) -> StepFunction {
    let mut v = s.coefficients().to_vec();
    fwht(&mut v);
    StepFunction::from_raw(s.resolution(), v)
}

/// `S_n f = Σ_{k<n} f̂(k) w_k`, with `S_0 f = 0`.
pub fn partial_sum(f: &StepFunction, n: usize) -> Result<StepFunction> {
    f.resolution().check_order(n)?;
    Ok(synthesize(&analyze(f).truncated(n)?))
}
