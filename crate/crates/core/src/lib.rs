//! Numerical tools for multiplicative arithmetic functions: segmented
//! sieves, weighted exponential sums, self-correlations, Gowers-type cube
//! sums and weighted cubic averages along rotation and polynomial orbits.

pub mod correlation;
pub mod dynamics;
mod error;
pub mod expsum;
pub mod fft;
pub mod gowers;
mod ladder;
pub mod numeric;
pub mod oracle;
pub mod sieve;

pub use correlation::{
    autocorrelation, autocorrelation_with, cesaro_abs, geometric_summability,
    geometric_summability_with, mrt_window_sum, order3_quantity, squared_correlation,
    AutocorrOptions, CorrelationProfile, GeometricLevel, GeometricSummabilitySeries,
};
pub use dynamics::{
    cubic_weighted_average, kbsz_probe, mangoldt_cubic_average, sampled_cubic_average,
    wiener_wintner_probe, CubicAverageResult, KbszReport, KbszVerdict, MangoldtCubicAverage,
    SystemVariant, ToySystem,
};
pub use error::{ArfError, Result};
pub use expsum::{
    dd_profile, exp_sum, fit_best, fit_decay, grid_supremum, mangoldt_exp_sum_profile,
    poly_exp_sum, sup_exp_sum, DecayFit, DecayModel, DecayPoint, FitFlag, GridSupremum, GOLDEN,
};
pub use gowers::{
    cube_sum, gowers_box_norm, local_factor, local_product, mangoldt_box_sum, prime_average_gap,
    w_trick_table, CubeSpec, LocalFactor,
};
pub use ladder::Ladder;
pub use sieve::{
    load_table, save_table, sieve_prime_logs, sieve_table, sieve_window, FunctionKind,
    FunctionTable, SieveConfig, TableCache,
};
