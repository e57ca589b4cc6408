//! Two-parameter decay fits on linearised coordinates.
//!
//! * log-power: `y = C / (log N)^κ`, fitted as a line in `(log log N, log y)`
//! * power: `y = C · N^{-θ}`, fitted as a line in `(log N, log y)`

use serde::{Deserialize, Serialize};

use crate::error::{ArfError, Result};

/// Exponents at or below this are reported as "no decay".
pub const NO_DECAY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayModel {
    LogPower,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitFlag {
    /// Fewer than two distinct abscissae; the fit carries no information.
    Degenerate,
    /// The fitted exponent is not positive.
    NoDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub n: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: DecayModel,
    #[serde(rename = "C")]
    pub c: f64,
    pub exponent: f64,
    pub r_squared: f64,
    pub points: Vec<DecayPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<FitFlag>,
}

impl DecayFit {
    pub fn decays(&self) -> bool {
        self.flag.is_none()
    }

    /// Model prediction at `n`.
    pub fn predict(&self, n: u64) -> f64 {
        let x = transform_x(self.model, n);
        self.c * (-self.exponent * x).exp()
    }
}

fn transform_x(model: DecayModel, n: u64) -> f64 {
    match model {
        DecayModel::LogPower => (n as f64).ln().ln(),
        DecayModel::Power => (n as f64).ln(),
    }
}

pub fn fit_decay(points: &[DecayPoint], model: DecayModel) -> Result<DecayFit> {
    for p in points {
        if !(p.value > 0.0 && p.value.is_finite()) {
            return Err(ArfError::usage(format!(
                "decay fits need positive values, got {} at n = {}",
                p.value, p.n
            )));
        }
        let min_n = match model {
            DecayModel::LogPower => 2,
            DecayModel::Power => 1,
        };
        if p.n < min_n {
            return Err(ArfError::usage(format!(
                "n = {} is outside the domain of the {model:?} model",
                p.n
            )));
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| transform_x(model, p.n)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.value.ln()).collect();
    let count = xs.len() as f64;

    let distinct_x = xs.iter().any(|&x| x != xs[0]);
    if points.len() < 2 || !distinct_x {
        let c = if points.is_empty() {
            0.0
        } else {
            (ys.iter().sum::<f64>() / count).exp()
        };
        return Ok(DecayFit {
            model,
            c,
            exponent: 0.0,
            r_squared: 0.0,
            points: points.to_vec(),
            flag: Some(FitFlag::Degenerate),
        });
    }

    let mx = xs.iter().sum::<f64>() / count;
    let my = ys.iter().sum::<f64>() / count;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let exponent = -slope;
    Ok(DecayFit {
        model,
        c: intercept.exp(),
        exponent,
        r_squared,
        points: points.to_vec(),
        flag: (exponent <= NO_DECAY_TOLERANCE).then_some(FitFlag::NoDecay),
    })
}

/// Fits both models and keeps the one with the larger R² (log-power on ties).
pub fn fit_best(points: &[DecayPoint]) -> Result<DecayFit> {
    let power = fit_decay(points, DecayModel::Power)?;
    if points.iter().any(|p| p.n < 2) {
        return Ok(power);
    }
    let log_power = fit_decay(points, DecayModel::LogPower)?;
    Ok(if power.r_squared > log_power.r_squared {
        power
    } else {
        log_power
    })
}
