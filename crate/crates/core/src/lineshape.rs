//! First-harmonic lineshape models for the three reference systems.
//!
//! Each model is a truncated Bessel-Lorentzian sideband series in
//! dimensionless units:
//!
//! * CPT Λ-scheme: detuning and modulation frequency in units of the
//!   ground-state relaxation rate, response normalized so the in-phase
//!   amplitude equals the Lorentzian-pair sum of its closed form. Sideband
//!   weights carry argument 2m because the phase modulation enters the
//!   two-photon coherence doubled.
//! * Two-level optical transition: frequencies in units of the half
//!   linewidth, overall scale `S = [V/(gamma/2)]^2`, complex amplitude
//!   prefactor `S / (omega_m + 2i)`.
//! * Double radio-optical resonance: frequencies in units of the optical
//!   pumping rate, scale `s_rf`, prefactor `s_rf / (omega_m + i)`. Same
//!   series structure as the two-level system with the half linewidth
//!   replaced by the pumping rate; kept as an independent implementation so
//!   the structural equivalence stays a testable statement.
//!
//! The README records the mapping from these normalized amplitudes back to
//! physical absorption signals.

use num_complex::Complex64;

use crate::bessel::{bessel_j, bessel_row, BesselTable, MAX_ARGUMENT};
use crate::error::{Error, Result};

/// Fallback / floor for the number of sideband orders kept in series sums.
pub const KMAX_FLOOR: usize = 100;

/// Extra orders kept past the Bessel argument by the adaptive truncation.
pub const ADAPTIVE_MARGIN: usize = 60;

fn check_finite(value: f64, what: &'static str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

fn check_positive(value: f64, what: &'static str) -> Result<()> {
    check_finite(value, what)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { what, value })
    }
}

fn check_non_negative(value: f64, what: &'static str) -> Result<()> {
    check_finite(value, what)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { what, value })
    }
}

/// CPT resonance parameters, everything in units of the power-broadened
/// ground-state relaxation rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptParams {
    /// Two-photon detuning.
    pub delta_bar: f64,
    /// Modulation frequency, > 0.
    pub omega_m_bar: f64,
    /// Phase modulation index, >= 0.
    pub m: f64,
}

impl CptParams {
    pub fn validate(&self) -> Result<()> {
        check_finite(self.delta_bar, "CPT detuning")?;
        check_positive(self.omega_m_bar, "CPT modulation frequency")?;
        check_non_negative(self.m, "CPT modulation index")
    }
}

/// Two-level transition parameters in units of the half linewidth gamma/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    /// Laser detuning.
    pub delta_l_bar: f64,
    /// Modulation frequency, > 0.
    pub omega_m_bar: f64,
    /// Phase modulation index, >= 0.
    pub m: f64,
    /// Saturation scale [V/(gamma/2)]^2, > 0.
    pub saturation: f64,
}

impl TwoLevelParams {
    pub fn validate(&self) -> Result<()> {
        check_finite(self.delta_l_bar, "two-level detuning")?;
        check_positive(self.omega_m_bar, "two-level modulation frequency")?;
        check_non_negative(self.m, "two-level modulation index")?;
        check_positive(self.saturation, "two-level saturation scale")
    }
}

/// Double radio-optical resonance parameters in units of the optical pumping
/// rate V^2/Gamma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleResonanceParams {
    /// Effective rf detuning.
    pub delta_rf_bar: f64,
    /// Modulation frequency, > 0.
    pub omega_m_bar: f64,
    /// Phase modulation index, >= 0.
    pub m: f64,
    /// rf drive scale [V_rf/(V^2/Gamma)]^2, > 0.
    pub drive: f64,
}

impl DoubleResonanceParams {
    pub fn validate(&self) -> Result<()> {
        check_finite(self.delta_rf_bar, "double-resonance detuning")?;
        check_positive(self.omega_m_bar, "double-resonance modulation frequency")?;
        check_non_negative(self.m, "double-resonance modulation index")?;
        check_positive(self.drive, "double-resonance drive scale")
    }
}

/// How many sideband orders a series sum keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationPolicy {
    /// Use exactly `k_max` orders.
    Fixed,
    /// Use `max(k_max, ceil(|bessel argument|) + ADAPTIVE_MARGIN)`, so growing
    /// modulation indices never outrun the truncation.
    Adaptive,
}

/// Truncation setting for the sideband series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesTruncation {
    pub k_max: usize,
    pub policy: TruncationPolicy,
}

impl SeriesTruncation {
    /// Adaptive truncation with the default floor of 100 orders.
    pub fn adaptive() -> Self {
        Self {
            k_max: KMAX_FLOOR,
            policy: TruncationPolicy::Adaptive,
        }
    }

    /// Exactly `k_max` orders regardless of argument.
    pub fn fixed(k_max: usize) -> Self {
        Self {
            k_max,
            policy: TruncationPolicy::Fixed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max >= 1 {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                what: "series truncation k_max",
                value: self.k_max as f64,
            })
        }
    }

    /// Number of orders to sum for a series whose Bessel argument is given.
    pub fn resolve(&self, bessel_argument: f64) -> usize {
        match self.policy {
            TruncationPolicy::Fixed => self.k_max,
            TruncationPolicy::Adaptive => self
                .k_max
                .max(bessel_argument.abs().ceil() as usize + ADAPTIVE_MARGIN),
        }
    }
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self::adaptive()
    }
}

/// In-phase (cos omega_m t) and quadrature (sin omega_m t) amplitudes of the
/// first harmonic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicResponse {
    pub in_phase: f64,
    pub quadrature: f64,
}

impl HarmonicResponse {
    pub const ZERO: Self = Self {
        in_phase: 0.0,
        quadrature: 0.0,
    };
}

/// Which closed form of the CPT in-phase amplitude to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CptInPhaseVariant {
    /// Lorentzian-pair sum, algebraically equal to the full series in-phase
    /// amplitude at matched truncation.
    PairSum,
    /// Small-detuning limit of the pair sum.
    SmallDelta,
}

fn series_row(argument: f64, truncation: &SeriesTruncation) -> Result<(usize, BesselTable)> {
    truncation.validate()?;
    let k_max = truncation.resolve(argument);
    if argument.abs() >= MAX_ARGUMENT {
        return Err(Error::Domain {
            what: "modulation index too large for Bessel evaluation",
        });
    }
    // One extra order because terms reference J_{k+1}.
    let row = bessel_row(argument, k_max + 1)?;
    Ok((k_max, row))
}

/// First-harmonic response of the CPT resonance.
///
/// The overall physical prefactor is normalized away; the in-phase component
/// equals the Lorentzian-pair closed form of [`cpt_in_phase_closed_form`]
/// exactly. `m = 0` yields an exactly zero response.
pub fn cpt_first_harmonic(p: &CptParams, t: &SeriesTruncation) -> Result<HarmonicResponse> {
    p.validate()?;
    t.validate()?;
    if p.m == 0.0 {
        return Ok(HarmonicResponse::ZERO);
    }
    let (k_max, row) = series_row(2.0 * p.m, t)?;
    let mut in_phase = 0.0;
    let mut quadrature = 0.0;
    for k in -(k_max as i64)..=k_max as i64 {
        let j = row.j(k);
        let jm = row.j(k - 1);
        let jp = row.j(k + 1);
        let d = p.delta_bar + k as f64 * p.omega_m_bar;
        let den = d * d + 1.0;
        in_phase += j * (jm + jp) / den;
        quadrature += j * (jm - jp) * d / den;
    }
    Ok(HarmonicResponse {
        in_phase,
        quadrature,
    })
}

/// Closed forms of the CPT in-phase amplitude; `PairSum` is the exact
/// Lorentzian-pair rewriting of the series, `SmallDelta` its small-detuning
/// limit. Both carry a 1/m factor, so `m = 0` is rejected.
pub fn cpt_in_phase_closed_form(p: &CptParams, variant: CptInPhaseVariant) -> Result<f64> {
    p.validate()?;
    if p.m == 0.0 {
        return Err(Error::Domain {
            what: "CPT closed form requires m > 0 (the series form handles m = 0)",
        });
    }
    let t = SeriesTruncation::adaptive();
    let (k_max, row) = series_row(2.0 * p.m, &t)?;
    let mut sum = 0.0;
    for k in 1..=k_max as i64 {
        let kj = k as f64 * row.j(k);
        match variant {
            CptInPhaseVariant::PairSum => {
                let d_plus = p.delta_bar + k as f64 * p.omega_m_bar;
                let d_minus = p.delta_bar - k as f64 * p.omega_m_bar;
                sum += kj * kj / ((d_plus * d_plus + 1.0) * (d_minus * d_minus + 1.0));
            }
            CptInPhaseVariant::SmallDelta => {
                let lor = kj / ((k as f64 * p.omega_m_bar).powi(2) + 1.0);
                sum += lor * lor;
            }
        }
    }
    Ok(-4.0 * p.delta_bar * (p.omega_m_bar / p.m) * sum)
}

/// First-harmonic complex amplitude of the two-level transition; in-phase and
/// quadrature are its real and imaginary parts. The prefactor denominator is
/// `omega_m + 2i` (the full linewidth) while the sideband Lorentzians carry
/// the half linewidth.
pub fn two_level_first_harmonic(
    p: &TwoLevelParams,
    t: &SeriesTruncation,
) -> Result<HarmonicResponse> {
    p.validate()?;
    t.validate()?;
    if p.m == 0.0 {
        return Ok(HarmonicResponse::ZERO);
    }
    let (k_max, row) = series_row(p.m, t)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -(k_max as i64)..=k_max as i64 {
        let j = row.j(k);
        let jm = row.j(k - 1);
        let jp = row.j(k + 1);
        let d = p.delta_l_bar + k as f64 * p.omega_m_bar;
        sum += j * (jp / Complex64::new(d, -1.0) - jm / Complex64::new(d, 1.0));
    }
    let amp = Complex64::new(p.saturation, 0.0) / Complex64::new(p.omega_m_bar, 2.0) * sum;
    Ok(HarmonicResponse {
        in_phase: amp.re,
        quadrature: amp.im,
    })
}

/// Amplitude of the central dispersive curve in the resolved-sideband regime,
/// `2 J_0(m) J_1(m) (S/omega_m) delta/(delta^2+1)`; the explicit 1/omega_m is
/// the source of the two-level slope decay at high modulation frequency.
pub fn two_level_central_amplitude(p: &TwoLevelParams) -> Result<f64> {
    p.validate()?;
    let j0 = bessel_j(0, p.m)?;
    let j1 = bessel_j(1, p.m)?;
    Ok(
        2.0 * j0 * j1 * (p.saturation / p.omega_m_bar) * p.delta_l_bar
            / (p.delta_l_bar * p.delta_l_bar + 1.0),
    )
}

/// Dominant term of the two-level in-phase amplitude for slow modulation,
/// `-4 delta S (omega_m/m) sum_k [k J_k(m) / ((k omega_m)^2 + 1)]^2`.
pub fn two_level_in_phase_low_freq(p: &TwoLevelParams) -> Result<f64> {
    p.validate()?;
    if p.m == 0.0 {
        return Err(Error::Domain {
            what: "two-level low-frequency form requires m > 0",
        });
    }
    let t = SeriesTruncation::adaptive();
    let (k_max, row) = series_row(p.m, &t)?;
    let mut sum = 0.0;
    for k in 1..=k_max as i64 {
        let lor = k as f64 * row.j(k) / ((k as f64 * p.omega_m_bar).powi(2) + 1.0);
        sum += lor * lor;
    }
    Ok(-4.0 * p.delta_l_bar * p.saturation * (p.omega_m_bar / p.m) * sum)
}

/// First-harmonic complex amplitude of the double radio-optical resonance in
/// units where the pumping rate is 1; prefactor denominator `omega_m + i`.
pub fn dr_first_harmonic(
    p: &DoubleResonanceParams,
    t: &SeriesTruncation,
) -> Result<HarmonicResponse> {
    p.validate()?;
    t.validate()?;
    if p.m == 0.0 {
        return Ok(HarmonicResponse::ZERO);
    }
    let (k_max, row) = series_row(p.m, t)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -(k_max as i64)..=k_max as i64 {
        let j = row.j(k);
        let jm = row.j(k - 1);
        let jp = row.j(k + 1);
        let d = p.delta_rf_bar + k as f64 * p.omega_m_bar;
        sum += j * (jp / Complex64::new(d, -1.0) - jm / Complex64::new(d, 1.0));
    }
    let amp = Complex64::new(p.drive, 0.0) / Complex64::new(p.omega_m_bar, 1.0) * sum;
    Ok(HarmonicResponse {
        in_phase: amp.re,
        quadrature: amp.im,
    })
}

/// A reference system together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Cpt(CptParams),
    TwoLevel(TwoLevelParams),
    DoubleResonance(DoubleResonanceParams),
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Cpt(p) => p.validate(),
            Model::TwoLevel(p) => p.validate(),
            Model::DoubleResonance(p) => p.validate(),
        }
    }

    pub fn first_harmonic(&self, t: &SeriesTruncation) -> Result<HarmonicResponse> {
        match self {
            Model::Cpt(p) => cpt_first_harmonic(p, t),
            Model::TwoLevel(p) => two_level_first_harmonic(p, t),
            Model::DoubleResonance(p) => dr_first_harmonic(p, t),
        }
    }

    pub fn detuning(&self) -> f64 {
        match self {
            Model::Cpt(p) => p.delta_bar,
            Model::TwoLevel(p) => p.delta_l_bar,
            Model::DoubleResonance(p) => p.delta_rf_bar,
        }
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        match &mut self {
            Model::Cpt(p) => p.delta_bar = detuning,
            Model::TwoLevel(p) => p.delta_l_bar = detuning,
            Model::DoubleResonance(p) => p.delta_rf_bar = detuning,
        }
        self
    }

    pub fn with_modulation(mut self, omega_m_bar: f64, m: f64) -> Self {
        match &mut self {
            Model::Cpt(p) => {
                p.omega_m_bar = omega_m_bar;
                p.m = m;
            }
            Model::TwoLevel(p) => {
                p.omega_m_bar = omega_m_bar;
                p.m = m;
            }
            Model::DoubleResonance(p) => {
                p.omega_m_bar = omega_m_bar;
                p.m = m;
            }
        }
        self
    }

    pub fn omega_m_bar(&self) -> f64 {
        match self {
            Model::Cpt(p) => p.omega_m_bar,
            Model::TwoLevel(p) => p.omega_m_bar,
            Model::DoubleResonance(p) => p.omega_m_bar,
        }
    }

    pub fn modulation_index(&self) -> f64 {
        match self {
            Model::Cpt(p) => p.m,
            Model::TwoLevel(p) => p.m,
            Model::DoubleResonance(p) => p.m,
        }
    }

    /// Amplitude scale factor of the model (1 for CPT).
    pub fn scale(&self) -> f64 {
        match self {
            Model::Cpt(_) => 1.0,
            Model::TwoLevel(p) => p.saturation,
            Model::DoubleResonance(p) => p.drive,
        }
    }

    /// Argument of the Bessel functions in this model's series.
    pub fn bessel_argument(&self) -> f64 {
        match self {
            Model::Cpt(p) => 2.0 * p.m,
            Model::TwoLevel(p) => p.m,
            Model::DoubleResonance(p) => p.m,
        }
    }
}
