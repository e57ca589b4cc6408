use std::fmt;
use std::str::FromStr;

use arf_core::{ToySystem, GOLDEN};
use serde::{Deserialize, Serialize};

/// Command-line form of a [`ToySystem`]: `rot:ALPHA:K`, `poly:a0,a1,…` or
/// `one`. `ALPHA` and the coefficients accept `golden`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SystemSpec {
    text: String,
    system: ToySystem,
}

impl SystemSpec {
    pub fn system(&self) -> &ToySystem {
        &self.system
    }
}

fn real(s: &str) -> Result<f64, String> {
    match s.trim() {
        "golden" => Ok(GOLDEN),
        t => t.parse().map_err(|_| format!("bad number `{t}`")),
    }
}

impl FromStr for SystemSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let system = match parts.as_slice() {
            ["one"] => ToySystem::trivial(),
            ["rot", alpha, k] => {
                let alpha = real(alpha)?;
                if !(0.0..1.0).contains(&alpha) {
                    return Err(format!("rotation angle {alpha} is outside [0, 1)"));
                }
                let k = k.trim().parse().map_err(|_| format!("bad character `{k}`"))?;
                ToySystem::rotation(alpha, k)
            }
            ["poly", coeffs] => {
                let c = coeffs.split(',').map(real).collect::<Result<Vec<_>, _>>()?;
                if c.len() > arf_core::expsum::MAX_POLY_DEGREE + 1 {
                    return Err("polynomial degree above 6".into());
                }
                ToySystem::polyphase(c)
            }
            _ => return Err(format!("cannot parse system `{s}`")),
        };
        Ok(SystemSpec {
            text: s.to_string(),
            system,
        })
    }
}

impl TryFrom<String> for SystemSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<SystemSpec> for String {
    fn from(s: SystemSpec) -> String {
        s.text
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}
