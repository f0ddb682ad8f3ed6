//! Search for the modulation parameters that maximize the error-signal
//! slope, and frequency sweeps built on that search.
//!
//! The detection phase is eliminated in closed form, so only the modulation
//! index is searched: a coarse grid locates the global maximum among the
//! local maxima produced by the oscillating sideband weights, then a
//! golden-section pass refines the bracket.

use crate::error::{Error, Result};
use crate::lineshape::{Model, SeriesTruncation, TwoLevelParams};
use crate::lockin::{max_slope_at_center, two_level_low_freq_slope_magnitude};

/// Refinement width for the modulation-index search.
const M_TOLERANCE: f64 = 1e-5;

/// (sqrt(5) - 1) / 2
const GOLDEN_RATIO_CONJUGATE: f64 = 0.618_033_988_749_894_9;

/// Slope optimum at one modulation frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumPoint {
    pub omega_m_bar: f64,
    pub m_opt: f64,
    /// Maximizing detection phase in [0, pi).
    pub alpha_opt: f64,
    pub slope_max: f64,
}

/// Slope optima over a frequency grid, with the global maximum kept as the
/// normalization for unity-peak plots.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Rows ordered by increasing modulation frequency.
    pub rows: Vec<OptimumPoint>,
    /// Largest slope in the table.
    pub normalization: f64,
}

impl SweepTable {
    /// Slopes scaled so the table maximum is 1.
    pub fn normalized_slopes(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| {
                if self.normalization > 0.0 {
                    r.slope_max / self.normalization
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Row with the largest slope.
    pub fn peak(&self) -> Option<&OptimumPoint> {
        self.rows
            .iter()
            .max_by(|a, b| a.slope_max.total_cmp(&b.slope_max))
    }
}

/// One row of the low-frequency stationarity diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityRow {
    pub omega_m_bar: f64,
    pub m_opt: f64,
    /// Frequency deviation m_opt * omega_m_bar in linewidth units.
    pub deviation: f64,
    pub slope: f64,
}

/// Default modulation-index search range: (0, 60] suffices down to
/// omega_m_bar = 0.05; below that the optimum follows the 1/omega hyperbola,
/// so the range is widened accordingly.
pub fn default_m_range(omega_m_bar: f64) -> (f64, f64) {
    if omega_m_bar >= 0.05 {
        (0.0, 60.0)
    } else {
        (0.0, 12.0 / omega_m_bar)
    }
}

/// Logarithmically spaced grid from `start` to `stop` inclusive.
pub fn log_spaced(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) {
        return Err(Error::NonFinite {
            what: "grid bounds",
        });
    }
    if points < 2 || start <= 0.0 || stop <= start {
        return Err(Error::Domain {
            what: "log grid needs 0 < start < stop and at least two points",
        });
    }
    let ratio = stop / start;
    let mut grid: Vec<f64> = (0..points)
        .map(|i| start * ratio.powf(i as f64 / (points - 1) as f64))
        .collect();
    grid[points - 1] = stop;
    Ok(grid)
}

fn validate_m_range(model: &Model, range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::NonFinite {
            what: "modulation index range",
        });
    }
    if lo < 0.0 || hi <= lo {
        return Err(Error::Domain {
            what: "modulation index range must satisfy 0 <= lo < hi",
        });
    }
    let argument_factor = match model {
        Model::Cpt(_) => 2.0,
        _ => 1.0,
    };
    if hi * argument_factor >= crate::bessel::MAX_ARGUMENT {
        return Err(Error::Domain {
            what: "modulation index range exceeds the Bessel argument limit",
        });
    }
    Ok(())
}

/// Coarse grid scan over (lo, hi] followed by golden-section refinement of
/// the best bracket. The objective is evaluated only inside the range.
fn grid_then_golden(
    objective: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tolerance: f64,
) -> (f64, f64) {
    let n = (((hi - lo) * 2.0).ceil() as usize).clamp(200, 4000);
    let step = (hi - lo) / n as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..n {
        let m = lo + (i + 1) as f64 * step;
        let v = objective(m);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let bracket_lo = if best_i == 0 {
        lo
    } else {
        lo + best_i as f64 * step
    };
    let bracket_hi = lo + (best_i + 2).min(n) as f64 * step;
    golden_section_max(objective, bracket_lo, bracket_hi, tolerance)
}

/// Golden-section search for the maximum of `f` on [a, b].
fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let mut x1 = b - GOLDEN_RATIO_CONJUGATE * (b - a);
    let mut x2 = a + GOLDEN_RATIO_CONJUGATE * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > xtol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN_RATIO_CONJUGATE * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN_RATIO_CONJUGATE * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximize the line-center slope over the modulation index at a fixed
/// modulation frequency; the detuning stored in `model` is ignored and the
/// detection phase is optimized in closed form. `m_range: None` applies
/// [`default_m_range`].
pub fn maximize_slope(
    model: &Model,
    omega_m_bar: f64,
    t: &SeriesTruncation,
    m_range: Option<(f64, f64)>,
) -> Result<OptimumPoint> {
    if !omega_m_bar.is_finite() || omega_m_bar <= 0.0 {
        return Err(Error::InvalidParameter {
            what: "modulation frequency",
            value: omega_m_bar,
        });
    }
    t.validate()?;
    let range = m_range.unwrap_or_else(|| default_m_range(omega_m_bar));
    validate_m_range(model, range)?;
    // one validation up front so the search objective is infallible
    let base = model
        .with_detuning(0.0)
        .with_modulation(omega_m_bar, range.1);
    base.validate()?;
    let objective = |m: f64| {
        max_slope_at_center(&base.with_modulation(omega_m_bar, m), t)
            .expect("parameters validated before search")
            .slope
    };
    let (m_opt, slope_max) = grid_then_golden(objective, range.0, range.1, M_TOLERANCE);
    let result = max_slope_at_center(&base.with_modulation(omega_m_bar, m_opt), t)?;
    Ok(OptimumPoint {
        omega_m_bar,
        m_opt,
        alpha_opt: result.alpha_opt,
        slope_max,
    })
}

/// [`maximize_slope`] at every frequency of the grid; rows come out ordered
/// by frequency and the table records its own maximum as normalization.
pub fn sweep_omega(
    model: &Model,
    omega_list: &[f64],
    t: &SeriesTruncation,
    m_range: Option<(f64, f64)>,
) -> Result<SweepTable> {
    if omega_list.is_empty() {
        return Err(Error::Domain {
            what: "empty modulation-frequency grid",
        });
    }
    let mut omegas = omega_list.to_vec();
    omegas.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(omegas.len());
    for omega in omegas {
        rows.push(maximize_slope(model, omega, t, m_range)?);
    }
    let normalization = rows
        .iter()
        .map(|r| r.slope_max)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SweepTable {
        rows,
        normalization,
    })
}

/// Stationarity diagnostic for slow modulation (all frequencies <= 0.1): the
/// optimal index, the frequency deviation `m_opt * omega_m_bar`, and the
/// maximal slope per grid point. The two-level model is driven by its
/// low-frequency in-phase form, which fixes the detection phase, so the
/// sweep reduces to the same index search as the other models.
pub fn stationarity_report(
    model: &Model,
    omega_list: &[f64],
    t: &SeriesTruncation,
) -> Result<Vec<StationarityRow>> {
    if omega_list.is_empty() {
        return Err(Error::Domain {
            what: "empty modulation-frequency grid",
        });
    }
    for &omega in omega_list {
        if !omega.is_finite() || omega <= 0.0 || omega > 0.1 {
            return Err(Error::Domain {
                what: "stationarity grid frequencies must lie in (0, 0.1]",
            });
        }
    }
    let mut omegas = omega_list.to_vec();
    omegas.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(omegas.len());
    for omega in omegas {
        let (m_opt, slope) = match model {
            Model::TwoLevel(p) => {
                let base = TwoLevelParams {
                    omega_m_bar: omega,
                    ..*p
                };
                base.validate()?;
                let range = default_m_range(omega);
                validate_m_range(model, range)?;
                grid_then_golden(
                    |m| {
                        two_level_low_freq_slope_magnitude(&TwoLevelParams { m, ..base })
                            .expect("parameters validated before search")
                    },
                    range.0,
                    range.1,
                    M_TOLERANCE,
                )
            }
            _ => {
                let p = maximize_slope(model, omega, t, None)?;
                (p.m_opt, p.slope_max)
            }
        };
        rows.push(StationarityRow {
            omega_m_bar: omega,
            m_opt,
            deviation: m_opt * omega,
            slope,
        });
    }
    Ok(rows)
}

/// Shift maximizing the line-center slope of a unit Lorentzian pair
/// `1/((d-s)^2+1) - 1/((d+s)^2+1)`; the slope is `4s/(s^2+1)^2`. Found by
/// scan plus golden-section refinement (the analytic answer 1/sqrt(3) serves
/// as the test oracle).
pub fn lorentzian_pair_shift() -> f64 {
    let slope = |s: f64| 4.0 * s / (s * s + 1.0).powi(2);
    let mut best = (0.0, f64::NEG_INFINITY);
    let mut s = 1e-3;
    while s <= 2.0 {
        let v = slope(s);
        if v > best.1 {
            best = (s, v);
        }
        s += 1e-3;
    }
    let (shift, _) = golden_section_max(slope, best.0 - 1e-3, best.0 + 1e-3, 1e-10);
    shift
}
