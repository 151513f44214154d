//! Explicit plane-wave spinors of the one-dimensional equation.
//!
//! In a region of constant potential `V` with `W = E − V`, the columns are
//!
//! ```text
//!   spin up,   ±p : (1, 0,  i n (W − m), ∓√2 n p)
//!   spin down, ±p : (0, 1, ±√2 n p,    −i n (W − m))
//! ```
//!
//! with `p = √(2mW)` and the normalisation factor `n = 1/(W + m)` (written α
//! in regions I/III, β in region II). Below the barrier top `p = iκ` and the
//! same columns become the decaying/growing modes, conventionally written with
//! `ρ = 1/(V − E − m) = −n`.
//!
//! The one-dimensional η these spinors diagonalise is not the standard one; it
//! is recovered from the spinors themselves by [`reconstruct_eta_1d`].

use std::f64::consts::SQRT_2;

use thiserror::Error;

use crate::clifford::EtaSet;
use crate::numerics::{
    c64, least_squares, Complex, ComplexMatrix, ComplexVector, NumericsError, RealMatrix,
};
use crate::waveop::{Regime, RegionOperator};

/// Residual above which a reconstructed η is declared inconsistent.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Required relative distance of `V − E` from `m` (where `ρ` diverges).
pub const RHO_SINGULAR_RTOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinorError {
    #[error("{requested:?} basis requested but E − V = {kinetic} selects the {actual:?} regime")]
    WrongRegime {
        requested: Regime,
        actual: Regime,
        kinetic: f64,
    },
    #[error("normalisation factor diverges: E − V = {kinetic}, m = {mass}")]
    SingularNormalization { kinetic: f64, mass: f64 },
    #[error("direction {0:?} does not belong to this regime")]
    DirectionMismatch(Direction),
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("spinor components must be non-zero and finite")]
    ZeroSpinor,
    #[error("upper components must be (1,0) for spin up or (0,1) for spin down")]
    BadUpperBlock,
    #[error("reconstruction residual {residual:.3e} exceeds {tol:.1e}: spinor convention is inconsistent")]
    InconsistentConvention { residual: f64, tol: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `e^{+ipz}`, eigenvalue `+p`.
    Forward,
    /// `e^{−ipz}`, eigenvalue `−p`.
    Backward,
    /// `e^{−κz}`, eigenvalue `+iκ`.
    Decaying,
    /// `e^{+κz}`, eigenvalue `−iκ`.
    Growing,
}

impl Direction {
    /// Sign multiplying the positive-branch momentum.
    fn branch(self) -> f64 {
        match self {
            Direction::Forward | Direction::Decaying => 1.0,
            Direction::Backward | Direction::Growing => -1.0,
        }
    }
}

/// Choice of the normalisation factor `n(W, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `n = 1/(W + m)`.
    PlusMass,
    /// `n = 1/(W − m)`.
    MinusMass,
}

/// Relative sign of the `√2 n p` entry in the spin-down columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignPattern {
    /// Forward spin down carries `+√2 n p` in the third slot.
    AsPrinted,
    /// Forward spin down carries `−√2 n p`.
    Flipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinorConvention {
    pub normalization: Normalization,
    pub sign_pattern: SignPattern,
}

impl Default for SpinorConvention {
    fn default() -> Self {
        Self {
            normalization: Normalization::PlusMass,
            sign_pattern: SignPattern::AsPrinted,
        }
    }
}

/// Values of the three named normalisation factors at one configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConventionValues {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
}

impl SpinorConvention {
    /// All conventions tried by the reconstruction, adopted one first.
    pub fn candidates() -> [SpinorConvention; 4] {
        use Normalization::*;
        use SignPattern::*;
        [
            SpinorConvention {
                normalization: PlusMass,
                sign_pattern: AsPrinted,
            },
            SpinorConvention {
                normalization: PlusMass,
                sign_pattern: Flipped,
            },
            SpinorConvention {
                normalization: MinusMass,
                sign_pattern: AsPrinted,
            },
            SpinorConvention {
                normalization: MinusMass,
                sign_pattern: Flipped,
            },
        ]
    }

    fn denominator(&self, kinetic: f64, mass: f64) -> f64 {
        match self.normalization {
            Normalization::PlusMass => kinetic + mass,
            Normalization::MinusMass => kinetic - mass,
        }
    }

    /// `n(W, m)`.
    pub fn factor(&self, kinetic: f64, mass: f64) -> f64 {
        1.0 / self.denominator(kinetic, mass)
    }

    /// `n(W − m) + 1`, the lower diagonal entry after the matching-frame shift.
    fn shifted_diagonal(&self, kinetic: f64, mass: f64) -> f64 {
        match self.normalization {
            Normalization::PlusMass => 2.0 * kinetic / (kinetic + mass),
            Normalization::MinusMass => 2.0,
        }
    }

    pub fn values(&self, energy: f64, v0: f64, mass: f64) -> ConventionValues {
        ConventionValues {
            alpha: self.factor(energy, mass),
            beta: self.factor(energy - v0, mass),
            rho: 1.0 / (v0 - energy - mass),
        }
    }
}

/// Basis spinor with its labels and eigenvalue of `P = Wη₁D + mη₁D†`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spinor {
    components: ComplexVector,
    matching: ComplexVector,
    pub spin: Spin,
    pub direction: Direction,
    pub regime: Regime,
    pub eigenvalue: Complex,
}

/// Change of component basis used for interface matching:
/// `c₃ → c₃ + i c₁`, `c₄ → c₄ − i c₂`.
///
/// Continuity of `ψ` is equivalent to continuity of `Tψ`. In this frame the
/// lower entries are `2iWn`, `√2np` instead of `in(W − m) ≈ −i`, so small
/// spin-mixing differences between regions are not lost to cancellation.
pub fn to_matching_frame(v: &ComplexVector) -> ComplexVector {
    let i = c64(0.0, 1.0);
    ComplexVector(vec![v[0], v[1], v[2] + i * v[0], v[3] - i * v[1]])
}

impl Spinor {
    /// Validates the normalisation convention of the upper block.
    pub fn new(
        components: ComplexVector,
        spin: Spin,
        direction: Direction,
        regime: Regime,
        eigenvalue: Complex,
    ) -> Result<Self, SpinorError> {
        if components.dim() != 4 || !components.is_finite() || components.norm_inf() == 0.0 {
            return Err(SpinorError::ZeroSpinor);
        }
        let one = c64(1.0, 0.0);
        let zero = c64(0.0, 0.0);
        let upper_ok = match spin {
            Spin::Up => components[0] == one && components[1] == zero,
            Spin::Down => components[0] == zero && components[1] == one,
        };
        if !upper_ok {
            return Err(SpinorError::BadUpperBlock);
        }
        let matching = to_matching_frame(&components);
        Ok(Self {
            components,
            matching,
            spin,
            direction,
            regime,
            eigenvalue,
        })
    }

    pub fn components(&self) -> &ComplexVector {
        &self.components
    }

    /// Components in the frame of [`to_matching_frame`], evaluated without
    /// cancellation.
    pub fn matching_components(&self) -> &ComplexVector {
        &self.matching
    }

    /// `ψ†Kψ` with the conserved-current matrix of [`current_matrix`].
    pub fn current(&self) -> f64 {
        probability_current(&self.components)
    }
}

/// Hermitian `K` with `Kη₁D = η₁D†K`, so that `ψ†Kψ` is the conserved
/// probability current of stationary solutions. Normalised such that a
/// forward spin-up mode of unit upper amplitude carries `2√2 n p`.
pub fn current_matrix() -> ComplexMatrix {
    let o = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    ComplexMatrix::from_rows(&[
        [o, o, o, -one],
        [o, o, one, o],
        [o, one, o, o],
        [-one, o, o, o],
    ])
}

/// `ψ†Kψ = 2 Re(c̄₂c₃ − c̄₁c₄)`.
pub fn probability_current(v: &ComplexVector) -> f64 {
    2.0 * (v[1].conj() * v[2] - v[0].conj() * v[3]).re
}

fn column(
    spin: Spin,
    branch: f64,
    kinetic: f64,
    mass: f64,
    momentum: Complex,
    conv: &SpinorConvention,
) -> (ComplexVector, ComplexVector) {
    let n = conv.factor(kinetic, mass);
    let i = c64(0.0, 1.0);
    let diag = i * (n * (kinetic - mass));
    let shifted = i * conv.shifted_diagonal(kinetic, mass);
    let off = momentum * (SQRT_2 * n * branch);
    let one = c64(1.0, 0.0);
    let zero = c64(0.0, 0.0);
    match spin {
        Spin::Up => (
            ComplexVector(vec![one, zero, diag, -off]),
            ComplexVector(vec![one, zero, shifted, -off]),
        ),
        Spin::Down => {
            let off = match conv.sign_pattern {
                SignPattern::AsPrinted => off,
                SignPattern::Flipped => -off,
            };
            (
                ComplexVector(vec![zero, one, off, -diag]),
                ComplexVector(vec![zero, one, off, -shifted]),
            )
        }
    }
}

fn check_inputs(kinetic: f64, mass: f64, conv: &SpinorConvention) -> Result<(), SpinorError> {
    if !(mass > 0.0) {
        return Err(SpinorError::NonPositiveMass(mass));
    }
    if conv.denominator(kinetic, mass).abs() <= RHO_SINGULAR_RTOL * mass {
        return Err(SpinorError::SingularNormalization { kinetic, mass });
    }
    Ok(())
}

fn build(
    spin: Spin,
    direction: Direction,
    regime: Regime,
    kinetic: f64,
    mass: f64,
    momentum: Complex,
    conv: &SpinorConvention,
) -> Spinor {
    let branch = direction.branch();
    let (components, matching) = column(spin, branch, kinetic, mass, momentum, conv);
    Spinor {
        components,
        matching,
        spin,
        direction,
        regime,
        eigenvalue: momentum * branch,
    }
}

/// Plane-wave spinor for `E > V`.
pub fn basis_propagating(
    energy: f64,
    potential: f64,
    mass: f64,
    spin: Spin,
    direction: Direction,
    conv: &SpinorConvention,
) -> Result<Spinor, SpinorError> {
    let kinetic = energy - potential;
    let regime = crate::waveop::classify(energy, potential);
    if regime != Regime::Propagating {
        return Err(SpinorError::WrongRegime {
            requested: Regime::Propagating,
            actual: regime,
            kinetic,
        });
    }
    if !matches!(direction, Direction::Forward | Direction::Backward) {
        return Err(SpinorError::DirectionMismatch(direction));
    }
    check_inputs(kinetic, mass, conv)?;
    let p = (2.0 * mass * kinetic).sqrt();
    Ok(build(
        spin,
        direction,
        regime,
        kinetic,
        mass,
        c64(p, 0.0),
        conv,
    ))
}

/// Evanescent spinor for `E < V`; `ρ = 1/(V − E − m)`, `κ = √(2m(V − E))`.
pub fn basis_evanescent(
    energy: f64,
    v0: f64,
    mass: f64,
    spin: Spin,
    direction: Direction,
    conv: &SpinorConvention,
) -> Result<Spinor, SpinorError> {
    let kinetic = energy - v0;
    let regime = crate::waveop::classify(energy, v0);
    if regime != Regime::Evanescent {
        return Err(SpinorError::WrongRegime {
            requested: Regime::Evanescent,
            actual: regime,
            kinetic,
        });
    }
    if !matches!(direction, Direction::Decaying | Direction::Growing) {
        return Err(SpinorError::DirectionMismatch(direction));
    }
    check_inputs(kinetic, mass, conv)?;
    let kappa = (-2.0 * mass * kinetic).sqrt();
    Ok(build(
        spin,
        direction,
        regime,
        kinetic,
        mass,
        c64(0.0, kappa),
        conv,
    ))
}

/// The four modes of one region in the order (up +, down +, up −, down −),
/// where "+" is forward/decaying.
pub fn region_basis(
    energy: f64,
    potential: f64,
    mass: f64,
    conv: &SpinorConvention,
) -> Result<[Spinor; 4], SpinorError> {
    let regime = crate::waveop::classify(energy, potential);
    let (plus, minus) = match regime {
        Regime::Propagating => (Direction::Forward, Direction::Backward),
        Regime::Evanescent => (Direction::Decaying, Direction::Growing),
        Regime::Critical => {
            return Err(SpinorError::WrongRegime {
                requested: Regime::Propagating,
                actual: regime,
                kinetic: energy - potential,
            })
        }
    };
    let make = |spin, dir| match regime {
        Regime::Propagating => basis_propagating(energy, potential, mass, spin, dir, conv),
        _ => basis_evanescent(energy, potential, mass, spin, dir, conv),
    };
    Ok([
        make(Spin::Up, plus)?,
        make(Spin::Down, plus)?,
        make(Spin::Up, minus)?,
        make(Spin::Down, minus)?,
    ])
}

/// Determinant of the 4×4 matrix of a region's basis columns.
pub fn basis_determinant(basis: &[Spinor; 4]) -> Complex {
    let cols: Vec<ComplexVector> = basis.iter().map(|s| s.components.clone()).collect();
    ComplexMatrix::from_columns(&cols)
        .determinant()
        .expect("4x4 is square")
}

/// Eigenpairs of `Wη + mη†` at one `(W, m)`.
#[derive(Clone, Debug)]
pub struct EtaSample {
    pub kinetic: f64,
    pub mass: f64,
    pub modes: Vec<(ComplexVector, Complex)>,
}

impl EtaSample {
    pub fn from_spinors(kinetic: f64, mass: f64, spinors: &[Spinor]) -> Self {
        Self {
            kinetic,
            mass,
            modes: spinors
                .iter()
                .map(|s| (s.components.clone(), s.eigenvalue))
                .collect(),
        }
    }

    /// The four propagating spinors of a region with `V = 0`.
    pub fn propagating(
        energy: f64,
        mass: f64,
        conv: &SpinorConvention,
    ) -> Result<Self, SpinorError> {
        let basis = region_basis(energy, 0.0, mass, conv)?;
        Ok(Self::from_spinors(energy, mass, &basis))
    }
}

#[derive(Clone, Debug)]
pub struct EtaReconstruction {
    pub eta: ComplexMatrix,
    /// `‖Ax − b‖₂` of the stacked real eigen-equations.
    pub residual: f64,
    pub rank_deficient: bool,
    /// `max|η²|`.
    pub nilpotency: f64,
    /// `max|ηη† + η†η − 2I|`.
    pub anticommutator: f64,
}

impl EtaReconstruction {
    pub fn algebra_holds(&self, tol: f64) -> bool {
        self.nilpotency <= tol && self.anticommutator <= tol
    }
}

/// Least-squares fit of η from eigenpairs, without the residual gate.
pub fn fit_eta_1d(samples: &[EtaSample]) -> Result<EtaReconstruction, SpinorError> {
    // Unknowns: x[2k] = Re η_k, x[2k+1] = Im η_k with k = 4i + j.
    let n_rows: usize = samples.iter().map(|s| s.modes.len() * 8).sum();
    let mut a = RealMatrix::zeros(n_rows.max(32), 32);
    let mut b = vec![0.0; n_rows.max(32)];
    let mut row = 0;
    for s in samples {
        let (w, m) = (s.kinetic, s.mass);
        for (u, lam) in &s.modes {
            for i in 0..4 {
                let (re_row, im_row) = (row, row + 1);
                for j in 0..4 {
                    let uj = u[j];
                    // W η_ij u_j
                    let k = 4 * i + j;
                    a[(re_row, 2 * k)] += w * uj.re;
                    a[(re_row, 2 * k + 1)] -= w * uj.im;
                    a[(im_row, 2 * k)] += w * uj.im;
                    a[(im_row, 2 * k + 1)] += w * uj.re;
                    // m conj(η_ji) u_j
                    let kt = 4 * j + i;
                    a[(re_row, 2 * kt)] += m * uj.re;
                    a[(re_row, 2 * kt + 1)] += m * uj.im;
                    a[(im_row, 2 * kt)] += m * uj.im;
                    a[(im_row, 2 * kt + 1)] -= m * uj.re;
                }
                let rhs = lam * u[i];
                b[re_row] = rhs.re;
                b[im_row] = rhs.im;
                row += 2;
            }
        }
    }
    let ls = least_squares(&a, &b)?;
    let eta = ComplexMatrix::from_fn(4, 4, |i, j| {
        let k = 4 * i + j;
        c64(ls.solution[2 * k], ls.solution[2 * k + 1])
    });
    let set = EtaSet::from_eta(eta.clone());
    let nilpotency = (&set.eta * &set.eta).max_abs();
    let anticommutator = set
        .eta
        .anticommutator(&set.eta_dagger)
        .max_abs_diff(&ComplexMatrix::identity(4).scale_real(2.0));
    Ok(EtaReconstruction {
        eta,
        residual: ls.residual,
        rank_deficient: ls.rank_deficient,
        nilpotency,
        anticommutator,
    })
}

/// Recovers the one-dimensional η such that `(Wη + mη†)u = λu` for every
/// supplied eigenpair. Fails when the fit residual exceeds
/// [`RECONSTRUCTION_TOL`].
pub fn reconstruct_eta_1d(samples: &[EtaSample]) -> Result<EtaReconstruction, SpinorError> {
    let rec = fit_eta_1d(samples)?;
    if !(rec.residual <= RECONSTRUCTION_TOL) {
        return Err(SpinorError::InconsistentConvention {
            residual: rec.residual,
            tol: RECONSTRUCTION_TOL,
        });
    }
    Ok(rec)
}

/// Sample points `(E, m)` used to validate a convention; chosen with `E` and
/// `m` of comparable size so the stacked system is well conditioned.
pub const VALIDATION_SAMPLES: [(f64, f64); 3] = [(0.7, 1.0), (1.9, 0.6), (0.35, 2.2)];

#[derive(Clone, Debug)]
pub struct ConventionReport {
    pub convention: SpinorConvention,
    pub reconstruction: EtaReconstruction,
    pub passed: bool,
}

/// Fits η from the convention's spinors and reports whether the fit is exact
/// and the fitted matrix obeys the η algebra (to `1e-10`).
pub fn validate_convention(conv: &SpinorConvention) -> Result<ConventionReport, SpinorError> {
    let samples = VALIDATION_SAMPLES
        .iter()
        .map(|&(e, m)| EtaSample::propagating(e, m, conv))
        .collect::<Result<Vec<_>, _>>()?;
    let rec = fit_eta_1d(&samples)?;
    let passed = rec.residual <= RECONSTRUCTION_TOL && rec.algebra_holds(1e-10);
    Ok(ConventionReport {
        convention: *conv,
        reconstruction: rec,
        passed,
    })
}

/// First convention in [`SpinorConvention::candidates`] that validates.
pub fn select_convention() -> Result<(SpinorConvention, Vec<ConventionReport>), SpinorError> {
    let mut reports = Vec::new();
    for conv in SpinorConvention::candidates() {
        let rep = validate_convention(&conv)?;
        let ok = rep.passed;
        reports.push(rep);
        if ok {
            return Ok((conv, reports));
        }
    }
    let worst = reports
        .iter()
        .map(|r| r.reconstruction.residual)
        .fold(f64::INFINITY, f64::min);
    Err(SpinorError::InconsistentConvention {
        residual: worst,
        tol: RECONSTRUCTION_TOL,
    })
}

/// `‖P s − λ s‖∞` for the region operator (built from η₁D) and a basis spinor.
pub fn eigen_consistency(op: &RegionOperator, s: &Spinor) -> f64 {
    let ps = op
        .matrix
        .mul_vec(&s.components)
        .expect("4-component spinor");
    (&ps - &s.components.scale(s.eigenvalue)).norm_inf()
}

/// Tolerance used when checking the algebra of a reconstructed η.
pub const RECONSTRUCTED_ALGEBRA_TOL: f64 = 1e-10;
