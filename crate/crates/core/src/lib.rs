//! Lock-in error-signal models for phase-modulation spectroscopy of narrow
//! atomic resonances.
//!
//! Phase-modulating the interrogating field at frequency `omega_m` with index
//! `m` makes the absorption of a reference transition oscillate at the
//! modulation harmonics; mixing the first harmonic with a detection phase
//! `alpha` produces the dispersive error signal that locks an oscillator to
//! line center. This crate models that chain for three reference systems —
//! the CPT resonance of a Λ-scheme, a two-level optical transition, and the
//! double radio-optical resonance — and finds the modulation parameters that
//! maximize the error-signal slope.
//!
//! * [`bessel`]: integer-order Bessel J rows for the sideband series.
//! * [`lineshape`]: closed-form first-harmonic in-phase/quadrature amplitudes
//!   as truncated Bessel-Lorentzian series, plus special-case forms.
//! * [`lockin`]: error-signal mixture, analytic line-center slopes, and the
//!   closed-form optimal detection phase.
//! * [`optimizer`]: slope maximization over the modulation index, frequency
//!   sweeps, low-frequency stationarity diagnostics.
//! * [`oracle`]: time-domain density-matrix integration with numerical
//!   synchronous detection, the independent check of every spectral formula.
//!
//! All models are dimensionless; see the README for the mapping back to
//! physical rates and field amplitudes.

pub mod bessel;
pub mod error;
pub mod lineshape;
pub mod lockin;
pub mod optimizer;
pub mod oracle;

pub use error::{Error, Result};
pub use lineshape::{
    CptParams, DoubleResonanceParams, HarmonicResponse, Model, SeriesTruncation, TwoLevelParams,
};
pub use lockin::{DemodulationSettings, SlopeComponents, SlopeResult};
pub use optimizer::{OptimumPoint, StationarityRow, SweepTable};
pub use oracle::{OdeSettings, TimeDomainResult};
