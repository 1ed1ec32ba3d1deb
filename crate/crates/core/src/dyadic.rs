//! Finite-resolution model of the dyadic (Walsh) group.
//!
//! At resolution `M` the group is represented by its `2^M` atoms, the cosets
//! of `I_M`. Atom `j` carries coordinates `x_k = (j >> k) & 1`, so `x_0` is
//! the least significant bit, the group operation is XOR, and the interval
//! `I_n(x)` is the residue class of `index(x)` modulo `2^n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_RESOLUTION: u32 = 24;

/// Number of binary coordinates retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Resolution(u32);

impl Resolution {
    pub fn new(m: u32) -> Result<Self> {
        if (1..=MAX_RESOLUTION).contains(&m) {
            Ok(Self(m))
        } else {
            Err(Error::InvalidResolution(m))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Number of atoms, `2^M`.
    pub fn size(self) -> usize {
        1usize << self.0
    }

    pub(crate) fn check_same(self, other: Resolution) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ResolutionMismatch {
                left: self.0,
                right: other.0,
            })
        }
    }

    /// Fails unless `order <= 2^M`.
    pub(crate) fn check_order(self, order: usize) -> Result<()> {
        if order > self.size() {
            Err(Error::OrderTooLarge {
                order: order as u64,
                resolution: self.0,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_depth(self, depth: u32) -> Result<()> {
        if depth > self.0 {
            Err(Error::DepthTooLarge {
                depth,
                resolution: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl std::fmt::Display for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An atom of the group, i.e. an `M`-bit coordinate vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElement {
    index: usize,
    resolution: Resolution,
}

impl GroupElement {
    pub fn new(index: usize, resolution: Resolution) -> Result<Self> {
        if index >= resolution.size() {
            return Err(Error::IndexOutOfRange {
                index: index as u64,
                resolution: resolution.bits(),
            });
        }
        Ok(Self { index, resolution })
    }

    pub fn identity(resolution: Resolution) -> Self {
        Self {
            index: 0,
            resolution,
        }
    }

    /// `e_t`: coordinate `t` set, all others zero.
    pub fn unit_vector(t: u32, resolution: Resolution) -> Result<Self> {
        if t >= resolution.bits() {
            return Err(Error::IndexOutOfRange {
                index: u64::from(t),
                resolution: resolution.bits(),
            });
        }
        Ok(Self {
            index: 1 << t,
            resolution,
        })
    }

    pub fn index(self) -> usize {
        self.index
    }

    pub fn resolution(self) -> Resolution {
        self.resolution
    }

    pub fn coordinate(self, k: u32) -> u8 {
        ((self.index >> k) & 1) as u8
    }

    /// Coordinatewise addition modulo 2. Fallible on mismatched
    /// resolutions, hence not `ops::Add`.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: GroupElement) -> Result<GroupElement> {
        self.resolution.check_same(other.resolution)?;
        Ok(Self {
            index: self.index ^ other.index,
            resolution: self.resolution,
        })
    }
}

/// `I_n(x)`: all atoms agreeing with `x` on the first `depth` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    depth: u32,
    residue: usize,
}

impl DyadicInterval {
    pub fn new(depth: u32, residue: usize) -> Result<Self> {
        if depth > MAX_RESOLUTION {
            return Err(Error::DepthTooLarge {
                depth,
                resolution: MAX_RESOLUTION,
            });
        }
        if residue >= 1usize << depth {
            return Err(Error::IndexOutOfRange {
                index: residue as u64,
                resolution: depth,
            });
        }
        Ok(Self { depth, residue })
    }

    /// `I_n := I_n(0)`.
    pub fn at_zero(depth: u32) -> Result<Self> {
        Self::new(depth, 0)
    }

    /// The interval of depth `depth` containing `x`.
    pub fn around(x: GroupElement, depth: u32) -> Result<Self> {
        x.resolution().check_depth(depth)?;
        Ok(Self {
            depth,
            residue: x.index() & mask(depth),
        })
    }

    pub fn depth(self) -> u32 {
        self.depth
    }

    pub fn residue(self) -> usize {
        self.residue
    }

    pub fn contains(self, x: GroupElement) -> bool {
        x.index() & mask(self.depth) == self.residue
    }

    /// Haar measure `2^{-depth}`.
    pub fn measure(self) -> f64 {
        (-(self.depth as f64)).exp2()
    }
}

#[inline]
pub(crate) fn mask(depth: u32) -> usize {
    (1usize << depth) - 1
}

/// A function constant on each atom of resolution `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    resolution: Resolution,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(resolution: Resolution, values: Vec<f64>) -> Result<Self> {
        if values.len() != resolution.size() {
            return Err(Error::LengthMismatch {
                expected: resolution.size(),
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { resolution, values })
    }

    /// Skips validation; callers guarantee length and finiteness.
    pub(crate) fn from_raw(resolution: Resolution, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), resolution.size());
        Self { resolution, values }
    }

    pub fn constant(resolution: Resolution, c: f64) -> Self {
        Self::from_raw(resolution, vec![c; resolution.size()])
    }

    pub fn zero(resolution: Resolution) -> Self {
        Self::constant(resolution, 0.0)
    }

    pub fn indicator_atom(resolution: Resolution, atom: usize) -> Result<Self> {
        let x = GroupElement::new(atom, resolution)?;
        let mut values = vec![0.0; resolution.size()];
        values[x.index()] = 1.0;
        Ok(Self::from_raw(resolution, values))
    }

    pub fn indicator_interval(resolution: Resolution, interval: DyadicInterval) -> Result<Self> {
        resolution.check_depth(interval.depth())?;
        let m = mask(interval.depth());
        let values = (0..resolution.size())
            .map(|j| {
                if j & m == interval.residue() {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Self::from_raw(resolution, values))
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value_at(&self, x: GroupElement) -> Result<f64> {
        self.resolution.check_same(x.resolution())?;
        Ok(self.values[x.index()])
    }

    /// `∫_G f dμ` with `μ(G) = 1`.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `x ↦ f(x + t)`.
    pub fn translate(&self, t: GroupElement) -> Result<StepFunction> {
        self.resolution.check_same(t.resolution())?;
        let shift = t.index();
        let values = (0..self.values.len())
            .map(|j| self.values[j ^ shift])
            .collect();
        Ok(Self::from_raw(self.resolution, values))
    }

    pub fn scaled(&self, factor: f64) -> StepFunction {
        self.map(|v| v * factor)
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> StepFunction {
        Self::from_raw(
            self.resolution,
            self.values.iter().map(|&v| op(v)).collect(),
        )
    }

    pub fn zip_with(
        &self,
        other: &StepFunction,
        op: impl Fn(f64, f64) -> f64,
    ) -> Result<StepFunction> {
        self.resolution.check_same(other.resolution)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self::from_raw(self.resolution, values))
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_abs_diff(&self, other: &StepFunction) -> Result<f64> {
        self.resolution.check_same(other.resolution)?;
        Ok(max_abs_diff(&self.values, &other.values))
    }

    pub fn is_constant(&self) -> bool {
        let first = self.values[0];
        self.values.iter().all(|&v| v == first)
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn group_add(a: GroupElement, b: GroupElement) -> Result<GroupElement> {
    a.add(b)
}

pub fn unit_vector(t: u32, resolution: Resolution) -> Result<GroupElement> {
    GroupElement::unit_vector(t, resolution)
}

pub fn interval_contains(interval: DyadicInterval, x: GroupElement) -> bool {
    interval.contains(x)
}

pub fn translate(f: &StepFunction, t: GroupElement) -> Result<StepFunction> {
    f.translate(t)
}

pub fn integrate(f: &StepFunction) -> f64 {
    f.integrate()
}
