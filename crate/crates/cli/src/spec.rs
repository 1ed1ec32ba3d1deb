//! Parsing of the function descriptor and order ranges accepted on the
//! command line.

use std::path::PathBuf;
use std::str::FromStr;

use wn_core::metrics::lip_generator;
use wn_core::transform::walsh_function;
use wn_core::{Error, LipVariant, Resolution, Result, StepFunction};

/// `walsh:k` | `lip:α[:variant[:seed]]` | `const:c` | `file:path`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Walsh(usize),
    Lip {
        alpha: f64,
        variant: LipVariant,
        seed: Option<u64>,
    },
    Const(f64),
    File(PathBuf),
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad function spec '{s}'"));
        let mut parts = s.splitn(2, ':');
        let head = parts.next().unwrap_or_default();
        let rest = parts.next().ok_or_else(bad)?;
        match head {
            "walsh" => rest.parse().map(Self::Walsh).map_err(|_| bad()),
            "const" => rest
                .parse::<f64>()
                .ok()
                .filter(|c| c.is_finite())
                .map(Self::Const)
                .ok_or_else(bad),
            "file" if !rest.is_empty() => Ok(Self::File(PathBuf::from(rest))),
            "lip" => {
                let fields: Vec<&str> = rest.split(':').collect();
                if fields.len() > 3 {
                    return Err(bad());
                }
                let alpha = fields[0].parse::<f64>().map_err(|_| bad())?;
                let variant = match fields.get(1) {
                    Some(v) => v.parse()?,
                    None => LipVariant::Lacunary,
                };
                let seed = match fields.get(2) {
                    Some(v) => Some(v.parse().map_err(|_| bad())?),
                    None => None,
                };
                Ok(Self::Lip {
                    alpha,
                    variant,
                    seed,
                })
            }
            _ => Err(bad()),
        }
    }
}

impl FunctionSpec {
    /// `default_seed` applies to `lip` specs without an explicit seed.
    pub fn realize(&self, resolution: Resolution, default_seed: u64) -> Result<StepFunction> {
        match self {
            Self::Walsh(k) => walsh_function(*k, resolution),
            Self::Lip {
                alpha,
                variant,
                seed,
            } => lip_generator(*alpha, resolution, *variant, seed.unwrap_or(default_seed)),
            Self::Const(c) => Ok(StepFunction::constant(resolution, *c)),
            Self::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                let f = wn_core::io::parse_step_function(&text)?;
                if f.resolution() != resolution {
                    return Err(Error::ResolutionMismatch {
                        left: f.resolution().bits(),
                        right: resolution.bits(),
                    });
                }
                Ok(f)
            }
        }
    }

    pub fn label(&self, default_seed: u64) -> String {
        match self {
            Self::Walsh(k) => format!("walsh:{k}"),
            Self::Lip {
                alpha,
                variant,
                seed,
            } => format!("lip:{alpha}:{variant}:{}", seed.unwrap_or(default_seed)),
            Self::Const(c) => format!("const:{c}"),
            Self::File(p) => format!("file:{}", p.display()),
        }
    }
}

/// `N`, `A:B` or `A:B:step`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderRange {
    pub start: usize,
    pub end: usize,
    pub step: Option<usize>,
}

impl FromStr for OrderRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad order range '{s}'"));
        let nums = s
            .split(':')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let range = match nums.as_slice() {
            [n] => Self {
                start: *n,
                end: *n,
                step: None,
            },
            [a, b] => Self {
                start: *a,
                end: *b,
                step: None,
            },
            [a, b, step] if *step > 0 => Self {
                start: *a,
                end: *b,
                step: Some(*step),
            },
            _ => return Err(bad()),
        };
        if range.start == 0 || range.start > range.end {
            return Err(Error::Parse(format!(
                "empty or zero-based order range '{s}'"
            )));
        }
        Ok(range)
    }
}

impl OrderRange {
    /// Every order in the range, honouring the step.
    pub fn orders(&self) -> Vec<usize> {
        (self.start..=self.end)
            .step_by(self.step.unwrap_or(1))
            .collect()
    }

    /// Powers of two within `[start, end]`.
    pub fn dyadic_orders(&self) -> Vec<usize> {
        (0..usize::BITS - 1)
            .map(|e| 1usize << e)
            .filter(|&n| n >= self.start && n <= self.end)
            .collect()
    }
}
