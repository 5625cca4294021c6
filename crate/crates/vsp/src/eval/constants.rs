//! Pre-registered thresholds for the convergence harness.

/// Acceptance band for the least-squares slope of log(median row-wise
/// error) against log(expected degree) in the blockmodel convergence
/// sweep. Registered before the library was written, from a prototype
/// oracle sweep (three-block model, sizes 500/1000/2000/4000, five seeds
/// per size) that measured a slope of about -0.40; the band is kept wide
/// because the finite-size slope carries logarithmic corrections on top
/// of the limiting -1/4 power.
pub const SWEEP_SLOPE_MIN: f64 = -0.6;
pub const SWEEP_SLOPE_MAX: f64 = -0.05;
