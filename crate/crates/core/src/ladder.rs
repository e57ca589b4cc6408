use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ArfError, Result};

/// A sequence of sample sizes `N`.
///
/// Parsed either as `start:stop:xFactor` (geometric, stop included when hit
/// exactly, e.g. `4096:4194304:x4`) or as a comma list (`1000,10000`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ladder(Vec<u64>);

impl Ladder {
    pub fn new(points: Vec<u64>) -> Self {
        Ladder(points)
    }

    /// `start, start·factor, …` while `≤ stop`.
    pub fn geometric(start: u64, stop: u64, factor: u64) -> Result<Self> {
        if start == 0 || factor < 2 || stop < start {
            return Err(ArfError::usage(format!(
                "bad geometric ladder {start}:{stop}:x{factor}"
            )));
        }
        let mut v = vec![start];
        let mut n = start;
        while let Some(next) = n.checked_mul(factor) {
            if next > stop {
                break;
            }
            v.push(next);
            n = next;
        }
        Ok(Ladder(v))
    }

    pub fn points(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.iter().copied().max()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    pub(crate) fn require_increasing(&self, min_len: usize) -> Result<()> {
        if self.len() < min_len {
            return Err(ArfError::usage(format!(
                "ladder needs at least {min_len} points, got {}",
                self.len()
            )));
        }
        if !self.is_strictly_increasing() {
            return Err(ArfError::usage("ladder must be strictly increasing"));
        }
        if self.0.first() == Some(&0) {
            return Err(ArfError::usage("ladder points must be positive"));
        }
        Ok(())
    }
}

impl From<Vec<u64>> for Ladder {
    fn from(v: Vec<u64>) -> Self {
        Ladder(v)
    }
}

impl FromStr for Ladder {
    type Err = ArfError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || ArfError::usage(format!("cannot parse ladder `{s}`"));
        let num = |t: &str| t.trim().replace('_', "").parse::<u64>().map_err(|_| bad());
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, factor] = parts.as_slice() else {
                return Err(bad());
            };
            let factor = factor.trim().strip_prefix('x').ok_or_else(bad)?;
            Ladder::geometric(num(start)?, num(stop)?, num(factor)?)
        } else {
            let v = s.split(',').map(num).collect::<Result<Vec<_>>>()?;
            if v.is_empty() {
                return Err(bad());
            }
            Ok(Ladder(v))
        }
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}
