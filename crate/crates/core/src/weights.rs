//! Nörlund weight sequences `{q_k}` and finite-horizon evidence for the
//! asymptotic conditions placed on them.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::rate_fit;

/// Growth slope (in log-log coordinates) above which a sequence is reported
/// as unbounded.
pub const DEFAULT_GROWTH_THRESHOLD: f64 = 0.1;

/// Default cut-off for the tail ratio `q_{N-1}/Q_N` in [`is_regular`].
pub const DEFAULT_REGULARITY_THRESHOLD: f64 = 0.01;

/// Descriptor grammar: `const` | `poly:<beta>` | `log` | `geom:<r>` | `custom:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Const,
    Poly(f64),
    Log,
    Geometric(f64),
    Custom(PathBuf),
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            let a =
                a.ok_or_else(|| Error::Parse(format!("weight spec '{s}' needs an argument")))?;
            a.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad number in weight spec '{s}'")))
        };
        match (head, arg) {
            ("const", None) => Ok(Self::Const),
            ("log", None) => Ok(Self::Log),
            ("poly", a) => Ok(Self::Poly(number(a)?)),
            ("geom", a) => {
                let r = number(a)?;
                if r < 0.0 {
                    return Err(Error::InvalidWeights(format!("geometric ratio {r} < 0")));
                }
                Ok(Self::Geometric(r))
            }
            ("custom", Some(path)) if !path.is_empty() => Ok(Self::Custom(PathBuf::from(path))),
            _ => Err(Error::Parse(format!("unknown weight spec '{s}'"))),
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const => write!(f, "const"),
            Self::Poly(b) => write!(f, "poly:{b}"),
            Self::Log => write!(f, "log"),
            Self::Geometric(r) => write!(f, "geom:{r}"),
            Self::Custom(p) => write!(f, "custom:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    /// Both non-decreasing and non-increasing.
    Constant,
    NonDecreasing,
    NonIncreasing,
    Neither,
}

impl Monotonicity {
    pub fn is_non_decreasing(self) -> bool {
        matches!(self, Self::Constant | Self::NonDecreasing)
    }

    pub fn is_non_increasing(self) -> bool {
        matches!(self, Self::Constant | Self::NonIncreasing)
    }
}

/// Materialized weights `q_0..q_{H-1}` with prefix sums `Q_0..Q_H`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    label: String,
    q: Vec<f64>,
    prefix: Vec<f64>,
}

impl WeightSequence {
    /// Builds from explicit values. Requires `q_0 > 0` and `q_k >= 0`.
    pub fn from_values(label: impl Into<String>, q: Vec<f64>) -> Result<Self> {
        match q.first() {
            None => return Err(Error::InvalidWeights("empty sequence".into())),
            Some(&q0) if q0.is_nan() || q0 <= 0.0 => {
                return Err(Error::InvalidWeights(format!("q_0 = {q0} must be > 0")))
            }
            _ => {}
        }
        if let Some(k) = q.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "q_{k} = {} is not a finite nonnegative number",
                q[k]
            )));
        }
        let mut prefix = Vec::with_capacity(q.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &v in &q {
            acc += v;
            prefix.push(acc);
        }
        Ok(Self {
            label: label.into(),
            q,
            prefix,
        })
    }

    /// Materializes a family up to `horizon` terms. Custom files are loaded
    /// in full and never extrapolated; `horizon` is ignored for them.
    pub fn from_spec(spec: &WeightSpec, horizon: usize) -> Result<Self> {
        let label = spec.to_string();
        let gen = |g: &dyn Fn(f64) -> f64| (0..horizon).map(|k| g(k as f64)).collect::<Vec<_>>();
        let q = match spec {
            WeightSpec::Const => vec![1.0; horizon],
            WeightSpec::Poly(beta) => gen(&|k| (k + 1.0).powf(*beta)),
            WeightSpec::Log => gen(&|k| (k + 2.0).ln()),
            WeightSpec::Geometric(r) => {
                let mut v = Vec::with_capacity(horizon);
                let mut term = 1.0;
                for _ in 0..horizon {
                    v.push(term);
                    term *= r;
                }
                v
            }
            WeightSpec::Custom(path) => return Self::load_custom(path),
        };
        Self::from_values(label, q)
    }

    fn load_custom(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let q = crate::io::parse_weights(&text)?;
        Self::from_values(format!("custom:{}", path.display()), q)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of materialized terms.
    pub fn horizon(&self) -> usize {
        self.q.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn q(&self, k: usize) -> Result<f64> {
        self.q.get(k).copied().ok_or(Error::WeightHorizon {
            index: k,
            horizon: self.q.len(),
        })
    }

    /// `Q_n = Σ_{k<n} q_k`.
    pub fn prefix(&self, n: usize) -> Result<f64> {
        self.prefix.get(n).copied().ok_or(Error::WeightHorizon {
            index: n,
            horizon: self.q.len(),
        })
    }

    /// Fails unless `q_0..q_{n-1}` are available.
    pub fn require(&self, n: usize) -> Result<()> {
        if n > self.q.len() {
            Err(Error::WeightHorizon {
                index: n.saturating_sub(1),
                horizon: self.q.len(),
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub(crate) fn q_unchecked(&self, k: usize) -> f64 {
        self.q[k]
    }

    #[inline]
    pub(crate) fn prefix_unchecked(&self, n: usize) -> f64 {
        self.prefix[n]
    }

    /// Monotonicity of `q_0..q_{len-1}` (clamped to the horizon).
    pub fn monotonicity_upto(&self, len: usize) -> Monotonicity {
        let q = &self.q[..len.min(self.q.len())];
        let mut up = true;
        let mut down = true;
        for w in q.windows(2) {
            up &= w[1] >= w[0];
            down &= w[1] <= w[0];
        }
        match (up, down) {
            (true, true) => Monotonicity::Constant,
            (true, false) => Monotonicity::NonDecreasing,
            (false, true) => Monotonicity::NonIncreasing,
            (false, false) => Monotonicity::Neither,
        }
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity_upto(self.q.len())
    }

    pub fn is_constant_weights(&self) -> bool {
        let q0 = self.q[0];
        self.q.iter().all(|&v| v == q0)
    }
}

pub fn weight_family(spec: &WeightSpec, horizon: usize) -> Result<WeightSequence> {
    WeightSequence::from_spec(spec, horizon)
}

/// Finite-horizon evidence that a positive sequence `a_n` stays bounded.
///
/// The verdict is read off the log-log slope of the running supremum over the
/// upper half of the horizon: a bounded sequence flattens out, a sequence
/// growing like `n^c` keeps slope `c`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundednessEvidence {
    pub horizon: usize,
    pub sup: f64,
    pub growth_slope: f64,
    pub threshold: f64,
    pub bounded: bool,
}

/// `values[i]` is `a_{first + i}`.
pub fn boundedness_evidence(first: usize, values: &[f64], threshold: f64) -> BoundednessEvidence {
    let horizon = first + values.len().saturating_sub(1);
    let sup = values.iter().copied().fold(0.0, f64::max);
    let mut running = Vec::with_capacity(values.len());
    let mut acc = f64::NEG_INFINITY;
    for &v in values {
        acc = acc.max(v);
        running.push(acc);
    }
    let start = values.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..values.len())
        .map(|i| ((first + i) as f64, running[i]))
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .unzip();
    let growth_slope = rate_fit(&xs, &ys).map(|f| f.slope).unwrap_or(0.0);
    BoundednessEvidence {
        horizon,
        sup,
        growth_slope,
        threshold,
        bounded: sup.is_finite() && growth_slope <= threshold,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub horizon: usize,
    pub threshold: f64,
    /// `ratios[n-1] = q_{n-1}/Q_n` for `n = 1..=horizon`.
    pub ratios: Vec<f64>,
    pub tail_ratio: f64,
    pub eventually_decreasing: bool,
    pub regular: bool,
}

/// Evidence for `q_{n-1}/Q_n → 0`: the ratio at `N` is below `threshold` and
/// non-increasing over the upper half of `1..=N`.
pub fn is_regular(q: &WeightSequence, horizon: usize, threshold: f64) -> Result<RegularityReport> {
    if horizon < 2 {
        return Err(Error::Precondition(format!(
            "regularity horizon {horizon} < 2"
        )));
    }
    q.require(horizon)?;
    let ratios: Vec<f64> = (1..=horizon)
        .map(|n| q.q_unchecked(n - 1) / q.prefix_unchecked(n))
        .collect();
    let tail_ratio = ratios[horizon - 1];
    let eventually_decreasing = ratios[horizon / 2..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    Ok(RegularityReport {
        horizon,
        threshold,
        tail_ratio,
        eventually_decreasing,
        regular: tail_ratio < threshold && eventually_decreasing,
        ratios,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MoriczSiddiqiReport {
    pub gamma: f64,
    /// `values[n-1] = c_n = n^{γ-1} Q_n^{-γ} Σ_{k<n} q_k^γ`.
    pub values: Vec<f64>,
    pub evidence: BoundednessEvidence,
}

impl MoriczSiddiqiReport {
    pub fn bounded(&self) -> bool {
        self.evidence.bounded
    }
}

/// Evaluates the γ-moment condition `sup_n c_n < ∞` over `n = 1..=horizon`.
pub fn moricz_siddiqi_condition(
    q: &WeightSequence,
    gamma: f64,
    horizon: usize,
) -> Result<MoriczSiddiqiReport> {
    if !(gamma > 1.0 && gamma <= 2.0) {
        return Err(Error::Precondition(format!(
            "gamma = {gamma} outside (1, 2]"
        )));
    }
    if horizon < 2 {
        return Err(Error::Precondition(format!("horizon {horizon} < 2")));
    }
    q.require(horizon)?;
    let mut moment = 0.0;
    let values: Vec<f64> = (1..=horizon)
        .map(|n| {
            moment += q.q_unchecked(n - 1).powf(gamma);
            let qn = q.prefix_unchecked(n);
            (n as f64).powf(gamma - 1.0) * moment / qn.powf(gamma)
        })
        .collect();
    let evidence = boundedness_evidence(1, &values, DEFAULT_GROWTH_THRESHOLD);
    Ok(MoriczSiddiqiReport {
        gamma,
        values,
        evidence,
    })
}

/// Evidence for `1/Q_n = O(1/n)`, i.e. `n/Q_n` bounded.
pub fn linear_growth_condition(q: &WeightSequence, horizon: usize) -> Result<BoundednessEvidence> {
    q.require(horizon)?;
    let values: Vec<f64> = (1..=horizon)
        .map(|n| n as f64 / q.prefix_unchecked(n))
        .collect();
    Ok(boundedness_evidence(1, &values, DEFAULT_GROWTH_THRESHOLD))
}

/// Evidence for `q_{n-1}/Q_n = O(1/n)`, i.e. `n q_{n-1}/Q_n` bounded.
pub fn last_weight_condition(q: &WeightSequence, horizon: usize) -> Result<BoundednessEvidence> {
    q.require(horizon)?;
    let values: Vec<f64> = (1..=horizon)
        .map(|n| n as f64 * q.q_unchecked(n - 1) / q.prefix_unchecked(n))
        .collect();
    Ok(boundedness_evidence(1, &values, DEFAULT_GROWTH_THRESHOLD))
}
