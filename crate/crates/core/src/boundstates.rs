//! Symmetric well `z ∈ [−L, L]` with periodic boundary conditions.
//!
//! `ψ(−L) = ψ(L)` for the plane-wave solutions requires `e^{2ipL/ħc} = 1`,
//! hence `E_n = n²π²ħ²c²/(2mL²)`. Each level carries four degenerate modes
//! (spin up/down, forward/backward) whose amplitudes are left undetermined
//! except for the overall normalisation.

use thiserror::Error;

use crate::numerics::{Complex, ComplexVector};
use crate::spinors::{region_basis, SpinorConvention, SpinorError};
use crate::waveop::PhysicalConstants;

/// Relative bracket width at which bisection stops.
pub const BISECTION_RTOL: f64 = 1e-12;
/// Tolerance of [`normalization_constraint`].
pub const NORMALIZATION_RTOL: f64 = 1e-10;
/// Number of degenerate modes per level.
pub const MULTIPLICITY: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WellError {
    #[error("well half-width must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("n_max must be at least 1")]
    NoLevels,
    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error(transparent)]
    Spinor(#[from] SpinorError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WellProblem {
    /// Half-width: the well spans `[−L, L]`, nm.
    pub length: f64,
    pub n_max: usize,
    pub constants: PhysicalConstants,
}

impl WellProblem {
    pub fn new(length: f64, n_max: usize, constants: PhysicalConstants) -> Result<Self, WellError> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(WellError::NonPositiveLength(length));
        }
        if !(constants.mass_c2 > 0.0) {
            return Err(WellError::NonPositiveMass(constants.mass_c2));
        }
        if n_max == 0 {
            return Err(WellError::NoLevels);
        }
        Ok(Self {
            length,
            n_max,
            constants,
        })
    }

    pub fn mass(&self) -> f64 {
        self.constants.mass_c2
    }

    /// `E₁ = π²ħ²c²/(2mL²)`.
    pub fn ground_energy(&self) -> f64 {
        let x = std::f64::consts::PI * self.constants.hbar_c / self.length;
        x * x / (2.0 * self.mass())
    }

    /// `pL/ħc` at energy `E`.
    fn half_phase(&self, energy: f64) -> f64 {
        (2.0 * self.mass() * energy).sqrt() * self.length / self.constants.hbar_c
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub n: usize,
    pub energy: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelSet {
    pub levels: Vec<Level>,
}

impl LevelSet {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// `max |Eᵢ − E′ᵢ| / E′ᵢ` over matching indices.
    pub fn max_rel_deviation(&self, reference: &LevelSet) -> f64 {
        self.levels
            .iter()
            .zip(&reference.levels)
            .map(|(a, b)| (a.energy - b.energy).abs() / b.energy)
            .fold(0.0, f64::max)
    }
}

/// `E_n` for `n = 1..=n_max`, eV.
pub fn energy_levels(w: &WellProblem) -> LevelSet {
    let e1 = w.ground_energy();
    LevelSet {
        levels: (1..=w.n_max)
            .map(|n| Level {
                n,
                energy: (n * n) as f64 * e1,
                multiplicity: MULTIPLICITY,
            })
            .collect(),
    }
}

/// `|e^{2ipL/ħc} − 1| = 2|sin(pL/ħc)|`.
pub fn periodic_residual(energy: f64, w: &WellProblem) -> Result<f64, WellError> {
    if !(energy > 0.0) {
        return Err(WellError::NonPositiveEnergy(energy));
    }
    Ok(2.0 * w.half_phase(energy).sin().abs())
}

/// Signed form `sin(pL/ħc)`: changes sign at every level.
fn signed_residual(energy: f64, w: &WellProblem) -> f64 {
    w.half_phase(energy).sin()
}

fn bisect(w: &WellProblem, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = signed_residual(lo, w);
    while hi - lo > BISECTION_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        let f_mid = signed_residual(mid, w);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All zeros of the periodic residual in `(0, E_hi]`.
///
/// Brackets sign changes of `sin(pL/ħc)` on a uniform grid of step
/// `3E₁/(4π)`, below a quarter of the smallest level spacing `3E₁` and
/// incommensurate with the levels, then bisects each bracket.
pub fn find_levels_numerically(w: &WellProblem, e_hi: f64) -> LevelSet {
    let mut levels = Vec::new();
    if !(e_hi > 0.0) {
        return LevelSet { levels };
    }
    let step = 3.0 * w.ground_energy() / (4.0 * std::f64::consts::PI);
    let mut lo = 0.5 * step;
    let mut f_lo = signed_residual(lo, w);
    while lo < e_hi {
        let hi = (lo + step).min(e_hi);
        let f_hi = signed_residual(hi, w);
        let root = if f_hi == 0.0 {
            Some(hi)
        } else if (f_hi > 0.0) != (f_lo > 0.0) {
            Some(bisect(w, lo, hi))
        } else {
            None
        };
        if let Some(energy) = root {
            levels.push(Level {
                n: levels.len() + 1,
                energy,
                multiplicity: MULTIPLICITY,
            });
        }
        lo = hi;
        f_lo = f_hi;
        if f_hi == 0.0 {
            // Step off the exact root so it is not bracketed twice.
            lo = hi * (1.0 + 4.0 * f64::EPSILON);
            f_lo = signed_residual(lo, w);
        }
    }
    LevelSet { levels }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationCheck {
    pub sum: f64,
    pub target: f64,
    /// `|sum − target| / target`.
    pub deviation: f64,
    pub passed: bool,
}

/// Checks `|A|² + |B|² + |A′|² + |B′|² = 1/(4L)` to [`NORMALIZATION_RTOL`].
pub fn normalization_constraint(amplitudes: &[Complex; 4], length: f64) -> NormalizationCheck {
    let sum: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let target = 1.0 / (4.0 * length);
    let deviation = (sum - target).abs() / target;
    NormalizationCheck {
        sum,
        target,
        deviation,
        passed: deviation <= NORMALIZATION_RTOL,
    }
}

/// Rescales amplitudes onto the constraint surface.
pub fn normalize_amplitudes(amplitudes: &[Complex; 4], length: f64) -> [Complex; 4] {
    let sum: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let s = (1.0 / (4.0 * length * sum)).sqrt();
    amplitudes.map(|a| a * s)
}

/// `∫_{−L}^{L} ψ†ψ dz` for the level-`n` state
/// `ψ = A u↑₊e^{ipz} + B u↓₊e^{ipz} + A′u↑₋e^{−ipz} + B′u↓₋e^{−ipz}`,
/// all four spinor components included.
///
/// The periodic trapezoid rule is exact here: the integrand is a trigonometric
/// polynomial of degree `2n` over whole periods. Every basis spinor has
/// `|u|² = 2` and the cross terms either vanish pointwise or integrate to
/// zero, so the result is `4L Σ|amp|²`.
pub fn spinor_norm(w: &WellProblem, n: usize, amplitudes: &[Complex; 4]) -> Result<f64, WellError> {
    let energy = (n * n) as f64 * w.ground_energy();
    let basis = region_basis(energy, 0.0, w.mass(), &SpinorConvention::default())?;
    // region_basis order: (up +, down +, up −, down −); amplitudes (A, B, A′, B′).
    let k = (2.0 * w.mass() * energy).sqrt() / w.constants.hbar_c;
    let samples = 8 * n + 16;
    let dz = 2.0 * w.length / samples as f64;
    let mut total = 0.0;
    for s in 0..samples {
        let z = -w.length + s as f64 * dz;
        let fwd = Complex::from_polar(1.0, k * z);
        let bwd = fwd.conj();
        let mut psi = ComplexVector::zeros(4);
        for (j, (b, amp)) in basis.iter().zip(amplitudes).enumerate() {
            let ph = if j < 2 { fwd } else { bwd };
            for r in 0..4 {
                psi[r] += b.components()[r] * amp * ph;
            }
        }
        total += psi.norm2().powi(2);
    }
    Ok(total * dz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference(n_max: usize) -> WellProblem {
        WellProblem::new(10.0, n_max, PhysicalConstants::default()).unwrap()
    }

    #[test]
    fn ground_level_value() {
        let e1 = energy_levels(&reference(1)).levels[0].energy;
        let expected = std::f64::consts::PI.powi(2) * 197.0f64.powi(2) / (2.0 * 0.5e6 * 100.0);
        assert!((e1 - expected).abs() < 1e-15 * expected);
        assert!((e1 - 3.83e-3).abs() < 0.005e-3);
    }

    #[test]
    fn scaling_laws() {
        let w = reference(3);
        let l = energy_levels(&w);
        assert_eq!(l.levels[1].energy / l.levels[0].energy, 4.0);
        let wide = WellProblem::new(20.0, 3, PhysicalConstants::default()).unwrap();
        for (a, b) in energy_levels(&wide).levels.iter().zip(&l.levels) {
            assert!((a.energy * 4.0 - b.energy).abs() < 1e-15 * b.energy);
        }
        assert!(l.levels.iter().all(|x| x.multiplicity == 4));
    }

    #[test]
    fn residual_values() {
        let w = reference(5);
        for lvl in energy_levels(&w).levels {
            assert!(periodic_residual(lvl.energy, &w).unwrap() <= 1e-10);
        }
        let e1 = w.ground_energy();
        let half = periodic_residual(e1 / 2.0, &w).unwrap();
        let oracle = 2.0 * (std::f64::consts::PI / 2f64.sqrt()).sin().abs();
        assert!((half - oracle).abs() < 1e-12);
        assert!((half - 1.60).abs() < 0.01);
        assert!(periodic_residual(0.0, &w).is_err());
    }

    #[test]
    fn numeric_levels_match_formula() {
        let w = reference(50);
        let analytic = energy_levels(&w);
        let found = find_levels_numerically(&w, 50.5f64.powi(2) * w.ground_energy());
        assert_eq!(found.len(), 50);
        assert!(found.max_rel_deviation(&analytic) <= 1e-10);
        for (a, b) in found.levels.iter().zip(&analytic.levels) {
            assert_eq!(a.n, b.n);
        }
    }

    #[test]
    fn below_ground_is_empty() {
        let w = reference(1);
        assert!(find_levels_numerically(&w, 0.9 * w.ground_energy()).is_empty());
        assert!(find_levels_numerically(&w, -1.0).is_empty());
    }

    #[test]
    fn level_count_inverts_formula() {
        let w = reference(1);
        let e1 = w.ground_energy();
        for ratio in [1.5, 4.2, 17.0, 99.9, 400.3] {
            let found = find_levels_numerically(&w, ratio * e1);
            assert_eq!(found.len(), ratio.sqrt().floor() as usize, "{ratio}");
        }
    }

    #[test]
    fn validation() {
        let c = PhysicalConstants::default();
        assert!(WellProblem::new(0.0, 1, c).is_err());
        assert!(WellProblem::new(1.0, 0, c).is_err());
    }

    #[test]
    fn normalization_families() {
        let l: f64 = 10.0;
        let single = [
            c64(1.0 / (2.0 * l.sqrt()), 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
        ];
        assert!(normalization_constraint(&single, l).passed);
        let q = (1.0 / (16.0 * l)).sqrt();
        let equal = [c64(q, 0.0), c64(0.0, q), c64(-q, 0.0), c64(0.0, -q)];
        assert!(normalization_constraint(&equal, l).passed);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let raw: [Complex; 4] =
            std::array::from_fn(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        assert!(!normalization_constraint(&raw, l).passed);
        assert!(normalization_constraint(&normalize_amplitudes(&raw, l), l).passed);
        // Upper-component normalisation would give 1/(2L) instead.
        let upper = [
            c64((1.0 / (2.0 * l)).sqrt(), 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
        ];
        assert!(!normalization_constraint(&upper, l).passed);
    }

    #[test]
    fn full_spinor_norm_yields_the_constraint() {
        let w = reference(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let raw: [Complex; 4] =
                std::array::from_fn(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let amps = normalize_amplitudes(&raw, w.length);
            let norm = spinor_norm(&w, n, &amps).unwrap();
            assert!((norm - 1.0).abs() < 1e-12, "{n} {norm}");
        }
    }

    proptest::proptest! {
        #[test]
        fn phase_rotation_invariance(phases in proptest::array::uniform4(0.0f64..6.3), l in 0.1f64..100.0) {
            let q = (1.0 / (16.0 * l)).sqrt();
            let amps = phases.map(|t| Complex::from_polar(q, t));
            let c = normalization_constraint(&amps, l);
            proptest::prop_assert!(c.passed);
        }

        #[test]
        fn residual_is_bounded(e in 1e-6f64..1e3) {
            let r = periodic_residual(e, &reference(1)).unwrap();
            proptest::prop_assert!((0.0..=2.0).contains(&r));
        }
    }
}
