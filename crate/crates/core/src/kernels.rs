//! Dirichlet, Fejér and Nörlund kernels.
//!
//! Each kernel has a Walsh multiplier `λ_n(k)`, nonzero only for `k < n`:
//!
//! | kernel | `λ_n(k)`        |
//! |--------|-----------------|
//! | `D_n`  | `1`             |
//! | `K_n`  | `(n-k)/n`       |
//! | `F_n`  | `Q_{n-k}/Q_n`   |
//!
//! The default constructors synthesize the multiplier with one fast
//! transform. The `*_direct` variants add Walsh functions one at a time in
//! `O(n·2^M)` and serve as an independent cross-check.

use crate::dyadic::{mask, Resolution, StepFunction};
use crate::error::{Error, Result};
use crate::transform::{synthesize, walsh_sign, Spectrum};
use crate::weights::WeightSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Dirichlet,
    Fejer,
    Norlund,
}

/// `|n|`: position of the most significant set bit.
pub fn highest_bit(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::OrderTooSmall { order: 0, min: 1 });
    }
    Ok(63 - n.leading_zeros())
}

fn check_order(n: usize, resolution: Resolution) -> Result<()> {
    if n == 0 {
        return Err(Error::OrderTooSmall { order: 0, min: 1 });
    }
    resolution.check_order(n)
}

fn from_multiplier(
    n: usize,
    resolution: Resolution,
    lambda: impl Fn(usize) -> f64,
) -> StepFunction {
    let c = (0..resolution.size())
        .map(|k| if k < n { lambda(k) } else { 0.0 })
        .collect();
    synthesize(&Spectrum::from_raw(resolution, c))
}

/// `D_n = Σ_{k<n} w_k`.
pub fn dirichlet_kernel(n: usize, resolution: Resolution) -> Result<StepFunction> {
    check_order(n, resolution)?;
    Ok(from_multiplier(n, resolution, |_| 1.0))
}

/// `K_n = (1/n) Σ_{k=1}^n D_k`.
pub fn fejer_kernel(n: usize, resolution: Resolution) -> Result<StepFunction> {
    check_order(n, resolution)?;
    let nf = n as f64;
    Ok(from_multiplier(n, resolution, |k| (nf - k as f64) / nf))
}

/// `F_n = (1/Q_n) Σ_{k=1}^n q_{n-k} D_k`.
pub fn norlund_kernel(
    q: &WeightSequence,
    n: usize,
    resolution: Resolution,
) -> Result<StepFunction> {
    check_order(n, resolution)?;
    q.require(n)?;
    let qn = q.prefix_unchecked(n);
    Ok(from_multiplier(n, resolution, |k| {
        q.prefix_unchecked(n - k) / qn
    }))
}

/// Builds `Σ_{k=1}^n c_k D_k` by running Dirichlet sums.
fn weighted_dirichlet_sum(
    n: usize,
    resolution: Resolution,
    weight: impl Fn(usize) -> f64,
) -> StepFunction {
    let size = resolution.size();
    let mut dk = vec![0.0; size];
    let mut acc = vec![0.0; size];
    for k in 1..=n {
        let c = weight(k);
        for (j, (d, a)) in dk.iter_mut().zip(acc.iter_mut()).enumerate() {
            *d += walsh_sign(k - 1, j);
            *a += c * *d;
        }
    }
    StepFunction::from_raw(resolution, acc)
}

pub fn dirichlet_kernel_direct(n: usize, resolution: Resolution) -> Result<StepFunction> {
    check_order(n, resolution)?;
    let values = (0..resolution.size())
        .map(|j| (0..n).map(|k| walsh_sign(k, j)).sum())
        .collect();
    Ok(StepFunction::from_raw(resolution, values))
}

pub fn fejer_kernel_direct(n: usize, resolution: Resolution) -> Result<StepFunction> {
    check_order(n, resolution)?;
    let inv = 1.0 / n as f64;
    Ok(weighted_dirichlet_sum(n, resolution, |_| inv))
}

pub fn norlund_kernel_direct(
    q: &WeightSequence,
    n: usize,
    resolution: Resolution,
) -> Result<StepFunction> {
    check_order(n, resolution)?;
    q.require(n)?;
    let qn = q.prefix_unchecked(n);
    Ok(weighted_dirichlet_sum(n, resolution, |k| {
        q.q_unchecked(n - k) / qn
    }))
}

/// Realizes a kernel by kind; `weights` is required for [`KernelKind::Norlund`].
pub fn kernel(
    kind: KernelKind,
    n: usize,
    resolution: Resolution,
    weights: Option<&WeightSequence>,
) -> Result<StepFunction> {
    match kind {
        KernelKind::Dirichlet => dirichlet_kernel(n, resolution),
        KernelKind::Fejer => fejer_kernel(n, resolution),
        KernelKind::Norlund => {
            let q = weights.ok_or_else(|| {
                Error::Precondition("norlund kernel needs a weight sequence".into())
            })?;
            norlund_kernel(q, n, resolution)
        }
    }
}

/// `D_{2^m} = 2^m·1_{I_m}`.
pub fn dirichlet_dyadic_closed_form(m: u32, resolution: Resolution) -> Result<StepFunction> {
    resolution.check_depth(m)?;
    let height = (1u64 << m) as f64;
    let mk = mask(m);
    let values = (0..resolution.size())
        .map(|j| if j & mk == 0 { height } else { 0.0 })
        .collect();
    Ok(StepFunction::from_raw(resolution, values))
}

/// Three-case closed form of `K_{2^m}`:
/// `(2^m+1)/2` on `I_m`; `2^{t-1}` on `x ∈ I_t \ I_{t+1}` with
/// `x - e_t ∈ I_m` (`t < m`); `0` elsewhere.
pub fn fejer_dyadic_closed_form(m: u32, resolution: Resolution) -> Result<StepFunction> {
    resolution.check_depth(m)?;
    let mk = mask(m);
    let values = (0..resolution.size())
        .map(|j| {
            let low = j & mk;
            if low == 0 {
                ((1u64 << m) as f64 + 1.0) / 2.0
            } else if low.is_power_of_two() {
                // Only coordinate t < m is set among the first m, so x lies
                // in I_t \ I_{t+1} and x - e_t lies in I_m.
                let t = low.trailing_zeros() as i32;
                2f64.powi(t - 1)
            } else {
                0.0
            }
        })
        .collect();
    Ok(StepFunction::from_raw(resolution, values))
}
