//! Synchronous detection: error-signal mixture and its slope at line center.
//!
//! The demodulated error signal is `in_phase * cos(alpha) - quadrature *
//! sin(alpha)`. Its discriminator slope is obtained by term-wise analytic
//! differentiation of the sideband series with respect to detuning (every
//! term is a rational function of the detuning), evaluated at line center.
//! The detection phase that maximizes the absolute slope has the closed form
//! implemented by [`optimal_alpha`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bessel::bessel_row;
use crate::error::{Error, Result};
use crate::lineshape::{
    two_level_in_phase_low_freq, HarmonicResponse, Model, SeriesTruncation, TwoLevelParams,
};

/// Synchronous detection settings. `alpha` is canonically reported in
/// [0, pi); the mixture itself is defined for any finite phase and flips sign
/// under `alpha -> alpha + pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemodulationSettings {
    pub alpha: f64,
    pub harmonic: u32,
}

impl DemodulationSettings {
    pub fn new(alpha: f64) -> Result<Self> {
        let d = Self { alpha, harmonic: 1 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::NonFinite {
                what: "detection phase",
            });
        }
        if self.harmonic != 1 {
            return Err(Error::InvalidParameter {
                what: "detection harmonic (only the first is modeled)",
                value: self.harmonic as f64,
            });
        }
        Ok(())
    }
}

impl Default for DemodulationSettings {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            harmonic: 1,
        }
    }
}

/// Error signal produced by mixing the first harmonic with phase `alpha`.
pub fn error_signal(r: &HarmonicResponse, d: &DemodulationSettings) -> f64 {
    r.in_phase * d.alpha.cos() - r.quadrature * d.alpha.sin()
}

/// Detuning derivatives of the two first-harmonic amplitudes at line center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeComponents {
    /// d(in_phase)/d(detuning) at zero detuning.
    pub d_in_phase: f64,
    /// d(quadrature)/d(detuning) at zero detuning.
    pub d_quadrature: f64,
}

impl SlopeComponents {
    pub fn magnitude(&self) -> f64 {
        self.d_in_phase.hypot(self.d_quadrature)
    }
}

/// Line-center slope of the error signal together with the phase that
/// maximizes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeResult {
    /// |d(error)/d(detuning)| at the optimal phase.
    pub slope: f64,
    /// Maximizing detection phase in [0, pi).
    pub alpha_opt: f64,
    pub components: SlopeComponents,
}

/// Analytic detuning derivatives of the model's first harmonic at line
/// center. The detuning stored in the model parameters is ignored.
pub fn slope_components(model: &Model, t: &SeriesTruncation) -> Result<SlopeComponents> {
    model.validate()?;
    t.validate()?;
    if model.modulation_index() == 0.0 {
        return Ok(SlopeComponents {
            d_in_phase: 0.0,
            d_quadrature: 0.0,
        });
    }
    let argument = model.bessel_argument();
    let k_max = t.resolve(argument);
    let row = bessel_row(argument, k_max + 1)?;
    let omega = model.omega_m_bar();
    match model {
        Model::Cpt(_) => {
            // d/d(delta) of N_k/(D^2+1) and M_k D/(D^2+1) at delta = 0
            let mut d_in_phase = 0.0;
            let mut d_quadrature = 0.0;
            for k in -(k_max as i64)..=k_max as i64 {
                let j = row.j(k);
                let jm = row.j(k - 1);
                let jp = row.j(k + 1);
                let d = k as f64 * omega;
                let den = d * d + 1.0;
                d_in_phase += j * (jm + jp) * (-2.0 * d) / (den * den);
                d_quadrature += j * (jm - jp) * (1.0 - d * d) / (den * den);
            }
            Ok(SlopeComponents {
                d_in_phase,
                d_quadrature,
            })
        }
        Model::TwoLevel(p) => {
            let mut sum = Complex64::new(0.0, 0.0);
            for k in -(k_max as i64)..=k_max as i64 {
                let j = row.j(k);
                let jm = row.j(k - 1);
                let jp = row.j(k + 1);
                let d = k as f64 * omega;
                let lp = Complex64::new(d, -1.0);
                let lm = Complex64::new(d, 1.0);
                sum += j * (-jp / (lp * lp) + jm / (lm * lm));
            }
            let amp = Complex64::new(p.saturation, 0.0) / Complex64::new(omega, 2.0) * sum;
            Ok(SlopeComponents {
                d_in_phase: amp.re,
                d_quadrature: amp.im,
            })
        }
        Model::DoubleResonance(p) => {
            let mut sum = Complex64::new(0.0, 0.0);
            for k in -(k_max as i64)..=k_max as i64 {
                let j = row.j(k);
                let jm = row.j(k - 1);
                let jp = row.j(k + 1);
                let d = k as f64 * omega;
                let lp = Complex64::new(d, -1.0);
                let lm = Complex64::new(d, 1.0);
                sum += j * (-jp / (lp * lp) + jm / (lm * lm));
            }
            let amp = Complex64::new(p.drive, 0.0) / Complex64::new(omega, 1.0) * sum;
            Ok(SlopeComponents {
                d_in_phase: amp.re,
                d_quadrature: amp.im,
            })
        }
    }
}

/// Signed slope of the error signal at line center for a fixed detection
/// phase.
pub fn slope_at_center(
    model: &Model,
    t: &SeriesTruncation,
    d: &DemodulationSettings,
) -> Result<f64> {
    d.validate()?;
    let c = slope_components(model, t)?;
    Ok(c.d_in_phase * d.alpha.cos() - c.d_quadrature * d.alpha.sin())
}

/// Detection phase in [0, pi) maximizing |c_in cos(alpha) - c_q sin(alpha)|
/// and the maximal value sqrt(c_in^2 + c_q^2). When the components lie on an
/// axis the two equivalent phases are broken toward the smaller one.
pub fn optimal_alpha(components: &SlopeComponents) -> Result<(f64, f64)> {
    let (ci, cq) = (components.d_in_phase, components.d_quadrature);
    if ci == 0.0 && cq == 0.0 {
        return Err(Error::Domain {
            what: "optimal detection phase of a zero component vector",
        });
    }
    let mut alpha = (-cq).atan2(ci);
    if alpha < 0.0 {
        alpha += PI;
    }
    if alpha >= PI {
        alpha -= PI;
    }
    alpha += 0.0; // normalize -0.0
    Ok((alpha, ci.hypot(cq)))
}

/// Line-center slope magnitude of the two-level low-frequency in-phase form,
/// which is linear in the detuning; the stored detuning is ignored. This is
/// the objective of the low-frequency stationarity sweep for the two-level
/// system, where the in-phase signal dominates.
pub fn two_level_low_freq_slope_magnitude(p: &TwoLevelParams) -> Result<f64> {
    let probe = TwoLevelParams {
        delta_l_bar: 1.0,
        ..*p
    };
    Ok(two_level_in_phase_low_freq(&probe)?.abs())
}

/// Slope at the optimal detection phase. A vanishing component vector (m = 0)
/// reports zero slope at phase 0.
pub fn max_slope_at_center(model: &Model, t: &SeriesTruncation) -> Result<SlopeResult> {
    let components = slope_components(model, t)?;
    if components.d_in_phase == 0.0 && components.d_quadrature == 0.0 {
        return Ok(SlopeResult {
            slope: 0.0,
            alpha_opt: 0.0,
            components,
        });
    }
    let (alpha_opt, slope) = optimal_alpha(&components)?;
    Ok(SlopeResult {
        slope,
        alpha_opt,
        components,
    })
}

#[cfg(test)]
// reference constants are frozen at 17 significant digits
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::lineshape::{CptParams, DoubleResonanceParams, TwoLevelParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    fn sample_models(rng: &mut ChaCha8Rng) -> [Model; 3] {
        let omega = rng.gen_range(0.1..8.0);
        let m = rng.gen_range(0.05..3.0);
        let scale = rng.gen_range(1e-4..1.0_f64);
        [
            Model::Cpt(CptParams {
                delta_bar: 0.0,
                omega_m_bar: omega,
                m,
            }),
            Model::TwoLevel(TwoLevelParams {
                delta_l_bar: 0.0,
                omega_m_bar: omega,
                m,
                saturation: scale,
            }),
            Model::DoubleResonance(DoubleResonanceParams {
                delta_rf_bar: 0.0,
                omega_m_bar: omega,
                m,
                drive: scale,
            }),
        ]
    }

    #[test]
    fn error_signal_mixture() {
        let d0 = DemodulationSettings::new(0.0).unwrap();
        assert_eq!(
            error_signal(
                &HarmonicResponse {
                    in_phase: 1.0,
                    quadrature: 0.0
                },
                &d0
            ),
            1.0
        );
        let d90 = DemodulationSettings::new(PI / 2.0).unwrap();
        let v = error_signal(
            &HarmonicResponse {
                in_phase: 0.0,
                quadrature: 1.0,
            },
            &d90,
        );
        assert!((v + 1.0).abs() < 1e-15);
        // mixture magnitude at its maximizing phase; alpha outside [0, pi)
        // is accepted by the mixture itself
        let d = DemodulationSettings {
            alpha: (-4.0_f64).atan2(3.0),
            harmonic: 1,
        };
        let v = error_signal(
            &HarmonicResponse {
                in_phase: 3.0,
                quadrature: 4.0,
            },
            &d,
        );
        assert!((v - 5.0).abs() < 1e-14);
    }

    #[test]
    fn optimal_alpha_examples() {
        let (a, s) = optimal_alpha(&SlopeComponents {
            d_in_phase: 1.0,
            d_quadrature: 0.0,
        })
        .unwrap();
        assert_eq!((a, s), (0.0, 1.0));
        let (a, s) = optimal_alpha(&SlopeComponents {
            d_in_phase: 0.0,
            d_quadrature: 1.0,
        })
        .unwrap();
        assert!((a - PI / 2.0).abs() < 1e-15);
        assert_eq!(s, 1.0);
        let (a, s) = optimal_alpha(&SlopeComponents {
            d_in_phase: -1.0,
            d_quadrature: 1.0,
        })
        .unwrap();
        assert!((a - PI / 4.0).abs() < 1e-15);
        assert!((s - 2.0_f64.sqrt()).abs() < 1e-15);
        // axis tie-break toward the smaller phase
        let (a, _) = optimal_alpha(&SlopeComponents {
            d_in_phase: -1.0,
            d_quadrature: 0.0,
        })
        .unwrap();
        assert_eq!(a, 0.0);
        assert!(optimal_alpha(&SlopeComponents {
            d_in_phase: 0.0,
            d_quadrature: 0.0
        })
        .is_err());
    }

    #[test]
    fn zero_index_slope_is_zero_for_all_models() {
        let t = SeriesTruncation::adaptive();
        for alpha in [0.0, 0.3, 2.0] {
            let d = DemodulationSettings::new(alpha).unwrap();
            let models = [
                Model::Cpt(CptParams {
                    delta_bar: 0.0,
                    omega_m_bar: 1.0,
                    m: 0.0,
                }),
                Model::TwoLevel(TwoLevelParams {
                    delta_l_bar: 0.0,
                    omega_m_bar: 1.0,
                    m: 0.0,
                    saturation: 0.3,
                }),
                Model::DoubleResonance(DoubleResonanceParams {
                    delta_rf_bar: 0.0,
                    omega_m_bar: 1.0,
                    m: 0.0,
                    drive: 0.3,
                }),
            ];
            for model in models {
                assert_eq!(slope_at_center(&model, &t, &d).unwrap(), 0.0);
                assert_eq!(max_slope_at_center(&model, &t).unwrap().slope, 0.0);
            }
        }
    }

    /// Independent slope oracle: Richardson-extrapolated central difference
    /// of the error signal in the detuning.
    fn finite_difference_slope(model: &Model, d: &DemodulationSettings) -> f64 {
        let t = SeriesTruncation::adaptive();
        let eval = |delta: f64| {
            let r = model.with_detuning(delta).first_harmonic(&t).unwrap();
            error_signal(&r, d)
        };
        let h = 1e-5;
        let diff = |h: f64| (eval(h) - eval(-h)) / (2.0 * h);
        let d1 = diff(h);
        let d2 = diff(h / 2.0);
        (4.0 * d2 - d1) / 3.0
    }

    #[test]
    fn analytic_slope_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let t = SeriesTruncation::adaptive();
        for _ in 0..12 {
            let alpha = rng.gen_range(0.0..PI);
            let d = DemodulationSettings::new(alpha).unwrap();
            for model in sample_models(&mut rng) {
                let analytic = slope_at_center(&model, &t, &d).unwrap();
                let numeric = finite_difference_slope(&model, &d);
                // skip near-zero mixtures where the relative measure is moot
                if analytic.abs() < 1e-12 * model.scale() {
                    continue;
                }
                assert!(
                    rel_err(analytic, numeric) < 1e-6,
                    "slope mismatch: analytic {analytic:e} numeric {numeric:e} for {model:?} alpha {alpha}"
                );
            }
        }
    }

    #[test]
    fn error_signal_vanishes_at_line_center_for_all_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let t = SeriesTruncation::adaptive();
        for _ in 0..10 {
            for model in sample_models(&mut rng) {
                let r = model.first_harmonic(&t).unwrap();
                for i in 0..16 {
                    let d = DemodulationSettings::new(i as f64 * PI / 16.0).unwrap();
                    let e = error_signal(&r, &d);
                    assert!(
                        e.abs() < 1e-12 * model.scale().max(1.0),
                        "nonzero error signal {e:e} at line center for {model:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_scan_agrees_with_closed_form_optimum() {
        let t = SeriesTruncation::adaptive();
        let model = Model::Cpt(CptParams {
            delta_bar: 0.0,
            omega_m_bar: 0.764,
            m: 0.652,
        });
        let c = slope_components(&model, &t).unwrap();
        let (_, best) = optimal_alpha(&c).unwrap();
        let n = 10_000;
        let mut scan_best = f64::NEG_INFINITY;
        for i in 0..n {
            let alpha = i as f64 * PI / n as f64;
            let v = (c.d_in_phase * alpha.cos() - c.d_quadrature * alpha.sin()).abs();
            scan_best = scan_best.max(v);
        }
        assert!(rel_err(scan_best, best) < 1e-6);
    }

    #[test]
    fn slope_is_linear_in_scale() {
        let t = SeriesTruncation::adaptive();
        let base = TwoLevelParams {
            delta_l_bar: 0.0,
            omega_m_bar: 2.0,
            m: 1.1,
            saturation: 0.25,
        };
        let s1 = max_slope_at_center(&Model::TwoLevel(base), &t).unwrap();
        let doubled = TwoLevelParams {
            saturation: 0.5,
            ..base
        };
        let s2 = max_slope_at_center(&Model::TwoLevel(doubled), &t).unwrap();
        assert_eq!(s2.slope, 2.0 * s1.slope, "exact doubling");
        assert_eq!(s2.alpha_opt, s1.alpha_opt);
        let dr_base = DoubleResonanceParams {
            delta_rf_bar: 0.0,
            omega_m_bar: 2.0,
            m: 1.1,
            drive: 0.25,
        };
        let d1 = max_slope_at_center(&Model::DoubleResonance(dr_base), &t).unwrap();
        let d2 = max_slope_at_center(
            &Model::DoubleResonance(DoubleResonanceParams {
                drive: 0.5,
                ..dr_base
            }),
            &t,
        )
        .unwrap();
        assert_eq!(d2.slope, 2.0 * d1.slope);
    }

    #[test]
    fn cpt_slope_components_reference() {
        // mpmath, 50-digit, |k| <= 250
        let t = SeriesTruncation::adaptive();
        let c = slope_components(
            &Model::Cpt(CptParams {
                delta_bar: 0.0,
                omega_m_bar: 0.764,
                m: 0.652,
            }),
            &t,
        )
        .unwrap();
        assert!(rel_err(c.d_in_phase, -0.56992527827990482) < 1e-13);
        assert!(rel_err(c.d_quadrature, -0.59386132297460993) < 1e-13);
    }

    #[test]
    fn demodulation_settings_validation() {
        assert!(DemodulationSettings::new(f64::NAN).is_err());
        assert!(DemodulationSettings {
            alpha: 0.1,
            harmonic: 2
        }
        .validate()
        .is_err());
        assert!(DemodulationSettings::new(2.5).is_ok());
    }
}
