//! Momentum-space operator of the first-order equation in a region of
//! constant potential, its dispersion relation, and the non-relativistic
//! limit it descends from.
//!
//! Units: energies in eV, lengths in nm. Momenta are carried in energy units,
//! `p = √(2m(E − V))` with `m = mc²`, and spatial phases are `p·z/ħc`.

use std::str::FromStr;

use thiserror::Error;

use crate::clifford::EtaSet;
use crate::numerics::{c64, Complex, ComplexMatrix};

/// Rounded `ħc`, eV·nm.
pub const DEFAULT_HBAR_C: f64 = 197.0;
/// Rounded electron rest energy, eV.
pub const DEFAULT_MASS_C2: f64 = 0.5e6;
/// Relative half-width of the band around `E = V` treated as critical.
pub const CRITICAL_RTOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveOpError {
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("free parameter a must be non-zero")]
    ZeroA,
    #[error("physical constants must be positive: hbar_c={hbar_c}, mass_c2={mass_c2}")]
    InvalidConstants { hbar_c: f64, mass_c2: f64 },
    #[error("kinetic energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

/// `ħc` (eV·nm) and the rest energy `mc²` (eV).
///
/// The defaults are rounded (`ħc = 197 eV·nm`, `mc² = 0.5 MeV`). The
/// oscillatory coefficients have phase arguments of order 10²–10⁴ rad, so
/// reference point values are only reproducible with exactly these constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    pub hbar_c: f64,
    pub mass_c2: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar_c: DEFAULT_HBAR_C,
            mass_c2: DEFAULT_MASS_C2,
        }
    }
}

impl PhysicalConstants {
    pub fn new(hbar_c: f64, mass_c2: f64) -> Result<Self, WaveOpError> {
        if !(hbar_c > 0.0 && hbar_c.is_finite() && mass_c2 > 0.0 && mass_c2.is_finite()) {
            return Err(WaveOpError::InvalidConstants { hbar_c, mass_c2 });
        }
        Ok(Self { hbar_c, mass_c2 })
    }

    /// Parses `key = value` lines (`hbar_c`, `mass_c2`); `#` starts a comment.
    /// Keys not present keep their values from `self`.
    pub fn with_config(mut self, text: &str) -> Result<Self, WaveOpError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| WaveOpError::Config {
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got {line:?}")))?;
            let value = f64::from_str(value.trim())
                .map_err(|e| err(format!("bad number for {}: {e}", key.trim())))?;
            match key.trim() {
                "hbar_c" => self.hbar_c = value,
                "mass_c2" => self.mass_c2 = value,
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        Self::new(self.hbar_c, self.mass_c2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Propagating,
    Evanescent,
    Critical,
}

/// Half-width of the critical band around `E = V`.
pub fn critical_width(energy: f64, potential: f64) -> f64 {
    CRITICAL_RTOL * energy.abs().max(potential.abs())
}

pub fn classify(energy: f64, potential: f64) -> Regime {
    let d = energy - potential;
    if d.abs() <= critical_width(energy, potential) {
        Regime::Critical
    } else if d > 0.0 {
        Regime::Propagating
    } else {
        Regime::Evanescent
    }
}

/// `P = (E − V)η + mη†` for one region.
#[derive(Clone, Debug)]
pub struct RegionOperator {
    pub energy: f64,
    pub potential: f64,
    pub mass: f64,
    pub matrix: ComplexMatrix,
    pub regime: Regime,
}

impl RegionOperator {
    pub fn kinetic(&self) -> f64 {
        self.energy - self.potential
    }

    /// `max|P² − 2m(E−V)I|` relative to the working scale `(|E−V| + m)²` of
    /// the product (the size of the individual terms that cancel in `P²`).
    pub fn square_deviation(&self) -> f64 {
        let w = self.kinetic();
        let target = ComplexMatrix::identity(4).scale_real(2.0 * self.mass * w);
        let scale = (w.abs() + self.mass).powi(2);
        (&self.matrix * &self.matrix).max_abs_diff(&target) / scale
    }
}

pub fn momentum_operator(
    energy: f64,
    potential: f64,
    mass: f64,
    eta: &EtaSet,
) -> Result<RegionOperator, WaveOpError> {
    if !(mass > 0.0) {
        return Err(WaveOpError::NonPositiveMass(mass));
    }
    let matrix = &eta.eta.scale_real(energy - potential) + &eta.eta_dagger.scale_real(mass);
    Ok(RegionOperator {
        energy,
        potential,
        mass,
        matrix,
        regime: classify(energy, potential),
    })
}

/// Solution of `p² = 2m(E − V)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Momentum {
    /// `p = √(2m(E−V))`, eV.
    Real(f64),
    /// `κ = √(2m(V−E))`, eV; the eigenvalues are `±iκ`.
    Imaginary(f64),
    Zero,
}

impl Momentum {
    /// Positive-branch eigenvalue of `P` (`p`, `iκ` or 0).
    pub fn eigenvalue(self) -> Complex {
        match self {
            Momentum::Real(p) => c64(p, 0.0),
            Momentum::Imaginary(k) => c64(0.0, k),
            Momentum::Zero => c64(0.0, 0.0),
        }
    }

    pub fn magnitude(self) -> f64 {
        match self {
            Momentum::Real(p) | Momentum::Imaginary(p) => p,
            Momentum::Zero => 0.0,
        }
    }
}

pub fn dispersion(energy: f64, potential: f64, mass: f64) -> Result<Momentum, WaveOpError> {
    if !(mass > 0.0) {
        return Err(WaveOpError::NonPositiveMass(mass));
    }
    let w = energy - potential;
    Ok(match classify(energy, potential) {
        Regime::Critical => Momentum::Zero,
        Regime::Propagating => Momentum::Real((2.0 * mass * w).sqrt()),
        Regime::Evanescent => Momentum::Imaginary((-2.0 * mass * w).sqrt()),
    })
}

/// Deviation of `Q² = ((1/a)Eη + a m η†)²` from `2mE·I`, relative to the
/// product scale `(|E/a| + |a|m)²`.
pub fn general_a_check(a: f64, energy: f64, mass: f64, eta: &EtaSet) -> Result<f64, WaveOpError> {
    if a == 0.0 {
        return Err(WaveOpError::ZeroA);
    }
    if !(mass > 0.0) {
        return Err(WaveOpError::NonPositiveMass(mass));
    }
    let q = &eta.eta.scale_real(energy / a) + &eta.eta_dagger.scale_real(a * mass);
    let target = ComplexMatrix::identity(4).scale_real(2.0 * mass * energy);
    let scale = (energy.abs() / a.abs() + a.abs() * mass).powi(2);
    Ok((&q * &q).max_abs_diff(&target) / scale)
}

/// Worst [`general_a_check`] deviation over `a ∈ ±[10⁻³, 10³]`, log-spaced.
pub fn general_a_sweep(
    energy: f64,
    mass: f64,
    eta: &EtaSet,
    points: usize,
) -> Result<f64, WaveOpError> {
    let mut worst = 0.0_f64;
    for k in 0..points {
        let t = if points > 1 {
            k as f64 / (points - 1) as f64
        } else {
            0.5
        };
        let a = 10f64.powf(-3.0 + 6.0 * t);
        worst = worst
            .max(general_a_check(a, energy, mass, eta)?)
            .max(general_a_check(-a, energy, mass, eta)?);
    }
    Ok(worst)
}

/// `|p_rel − p_nr| / p_rel` for kinetic energy `E′`:
/// `p_rel = √((E′+m)² − m²)`, `p_nr = √(2mE′)`.
///
/// Evaluated as `x / (√(1+x)(√(1+x)+1))` with `x = E′/2m`, which is the same
/// quantity without the cancellation of the direct difference.
pub fn nonrel_limit_residual(kinetic: f64, mass: f64) -> Result<f64, WaveOpError> {
    if !(kinetic > 0.0) {
        return Err(WaveOpError::NonPositiveEnergy(kinetic));
    }
    if !(mass > 0.0) {
        return Err(WaveOpError::NonPositiveMass(mass));
    }
    let x = kinetic / (2.0 * mass);
    let s = (1.0 + x).sqrt();
    Ok(x / (s * (s + 1.0)))
}
