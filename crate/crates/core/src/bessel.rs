//! Bessel functions of the first kind for integer order.
//!
//! The sideband series summed elsewhere in this crate need whole rows of
//! J_k(x) at once, for orders reaching a little past the argument. Rows are
//! produced by a single downward (Miller) recurrence pass normalized with the
//! even-order sum identity J_0(x) + 2 J_2(x) + 2 J_4(x) + ... = 1, which is
//! stable for every order and for arguments up to the supported `1e6`.

use crate::error::{Error, Result};

/// Largest supported argument magnitude.
pub const MAX_ARGUMENT: f64 = 1e6;

/// Below this magnitude the two-term power series is exact to double
/// precision and the recurrence ratios 2k/x would be needlessly extreme.
const TINY_ARGUMENT: f64 = 1e-8;

/// Rescaling bound for the unnormalized recurrence values. Both constants are
/// powers of two so rescaling is exact.
const RESCALE_LIMIT: f64 = f64::from_bits((830 + 1023) << 52); // 2^830
const RESCALE_FACTOR: f64 = f64::from_bits(((-830_i64 + 1023) as u64) << 52); // 2^-830

/// Row of J_0(x) ... J_{k_max}(x) for a fixed argument.
///
/// Negative orders are served through the parity identity
/// J_{-k}(x) = (-1)^k J_k(x).
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTable {
    argument: f64,
    values: Vec<f64>,
}

impl BesselTable {
    /// Argument the row was evaluated at.
    pub fn argument(&self) -> f64 {
        self.argument
    }

    /// Largest stored order.
    pub fn order_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Stored values, indexed by non-negative order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// J_k for any integer order. Orders beyond the stored range return 0,
    /// which is accurate whenever the table extends past the argument since
    /// J_k(x) decays super-exponentially in k there.
    pub fn j(&self, k: i64) -> f64 {
        let order = k.unsigned_abs() as usize;
        if order >= self.values.len() {
            return 0.0;
        }
        let v = self.values[order];
        if k < 0 && k % 2 != 0 {
            -v
        } else {
            v
        }
    }
}

/// J_k(x) for a single integer order (negative orders via parity).
pub fn bessel_j(k: i64, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite {
            what: "Bessel argument",
        });
    }
    if x.abs() >= MAX_ARGUMENT {
        return Err(Error::Domain {
            what: "Bessel argument magnitude out of supported range",
        });
    }
    let order = k.unsigned_abs() as usize;
    let flip = k < 0 && k % 2 != 0;
    let row = row_values(x, order);
    let v = row[order];
    Ok(if flip { -v } else { v })
}

/// Row of J_0(x) ... J_{k_max}(x) by downward recurrence with final
/// normalization; element-wise consistent with [`bessel_j`].
pub fn bessel_row(x: f64, k_max: usize) -> Result<BesselTable> {
    if !x.is_finite() {
        return Err(Error::NonFinite {
            what: "Bessel argument",
        });
    }
    if x.abs() >= MAX_ARGUMENT {
        return Err(Error::Domain {
            what: "Bessel argument magnitude out of supported range",
        });
    }
    Ok(BesselTable {
        argument: x,
        values: row_values(x, k_max),
    })
}

fn row_values(x: f64, k_max: usize) -> Vec<f64> {
    let ax = x.abs();
    let mut values = if ax < TINY_ARGUMENT {
        tiny_argument_row(ax, k_max)
    } else {
        miller_row(ax, k_max)
    };
    // J_k(-x) = (-1)^k J_k(x)
    if x < 0.0 {
        for (k, v) in values.iter_mut().enumerate() {
            if k % 2 != 0 {
                *v = -*v;
            }
        }
    }
    values
}

/// Two-term series around x = 0: J_k(x) = (x/2)^k / k! * (1 - (x/2)^2/(k+1)).
/// The truncation error is below 1e-33 relative for |x| < 1e-8.
fn tiny_argument_row(ax: f64, k_max: usize) -> Vec<f64> {
    let half = 0.5 * ax;
    let corr = half * half;
    let mut values = Vec::with_capacity(k_max + 1);
    let mut lead = 1.0; // (x/2)^k / k!
    for k in 0..=k_max {
        if k > 0 {
            lead *= half / k as f64;
        }
        values.push(lead * (1.0 - corr / (k + 1) as f64));
    }
    values
}

/// Miller's algorithm: seed the recurrence far above both the wanted order
/// and the turning point near k = x, run it downward, then scale the row so
/// the even-order sum identity holds.
fn miller_row(ax: f64, k_max: usize) -> Vec<f64> {
    let k_start = k_max + (1.5 * ax).ceil() as usize + 20;
    let mut values = vec![0.0; k_max + 1];
    let mut above = 0.0_f64; // unnormalized J at order k + 1
    let mut here = 1e-300_f64; // unnormalized J at order k
    let mut norm = 0.0_f64; // accumulates J_0 + 2 J_2 + 2 J_4 + ...
    for k in (0..=k_start).rev() {
        if k <= k_max {
            values[k] = here;
        }
        if k % 2 == 0 {
            norm += if k == 0 { here } else { 2.0 * here };
        }
        if k > 0 {
            let below = (2.0 * k as f64 / ax) * here - above;
            above = here;
            here = below;
            if here.abs() > RESCALE_LIMIT {
                here *= RESCALE_FACTOR;
                above *= RESCALE_FACTOR;
                norm *= RESCALE_FACTOR;
                for v in values.iter_mut() {
                    *v *= RESCALE_FACTOR;
                }
            }
        }
    }
    let inv = 1.0 / norm;
    for v in values.iter_mut() {
        *v *= inv;
    }
    values
}
