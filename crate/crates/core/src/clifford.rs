//! Dirac matrices in the standard (Dirac–Pauli) representation, the
//! nilpotent pair `η = (γ⁰ + iγ⁵)/√2`, `η†`, and checks of the algebra they
//! obey.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::numerics::{c64, Complex, ComplexMatrix};

/// Tolerance for exact algebraic identities among unit-modulus 4×4 matrices.
pub const IDENTITY_TOL: f64 = 1e-14;

/// Minkowski metric diag(+,−,−,−).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// `γ^μ` (upper index) and `γ⁵ = iγ⁰γ¹γ²γ³`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSet {
    pub gamma: [ComplexMatrix; 4],
    pub gamma5: ComplexMatrix,
}

/// The nilpotent pair entering the first-order equation.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaSet {
    pub eta: ComplexMatrix,
    pub eta_dagger: ComplexMatrix,
}

impl EtaSet {
    /// Wraps an arbitrary matrix together with its adjoint.
    pub fn from_eta(eta: ComplexMatrix) -> Self {
        let eta_dagger = eta.adjoint();
        Self { eta, eta_dagger }
    }
}

fn pauli() -> [[[Complex; 2]; 2]; 3] {
    let o = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    [
        [[o, one], [one, o]],
        [[o, -i], [i, o]],
        [[one, o], [o, -one]],
    ]
}

/// 4×4 matrix `[[a·σ, b·σ], [c·σ, d·σ]]` with block coefficients and a shared 2×2 block.
fn blocks(coeffs: [[f64; 2]; 2], block: [[Complex; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |r, c| block[r % 2][c % 2] * coeffs[r / 2][c / 2])
}

/// Standard representation: `γ⁰ = diag(1,1,−1,−1)`, `γ^i = [[0, σ_i], [−σ_i, 0]]`,
/// `γ⁵ = [[0, 1], [1, 0]]`.
pub fn build_standard_gammas() -> GammaSet {
    let id2 = [
        [c64(1.0, 0.0), c64(0.0, 0.0)],
        [c64(0.0, 0.0), c64(1.0, 0.0)],
    ];
    let s = pauli();
    let gamma0 = blocks([[1.0, 0.0], [0.0, -1.0]], id2);
    let gi = |k: usize| blocks([[0.0, 1.0], [-1.0, 0.0]], s[k]);
    let gamma5 = blocks([[0.0, 1.0], [1.0, 0.0]], id2);
    GammaSet {
        gamma: [gamma0, gi(0), gi(1), gi(2)],
        gamma5,
    }
}

impl GammaSet {
    /// `U γ U†` for every matrix in the set.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Self {
        let ud = u.adjoint();
        let conj = |g: &ComplexMatrix| &(u * g) * &ud;
        GammaSet {
            gamma: [
                conj(&self.gamma[0]),
                conj(&self.gamma[1]),
                conj(&self.gamma[2]),
                conj(&self.gamma[3]),
            ],
            gamma5: conj(&self.gamma5),
        }
    }

    /// `γ⁵` recomputed from the vector gammas.
    pub fn chirality_product(&self) -> ComplexMatrix {
        let p = &(&(&self.gamma[0] * &self.gamma[1]) * &self.gamma[2]) * &self.gamma[3];
        p.scale(c64(0.0, 1.0))
    }
}

/// `η = (γ⁰ + iγ⁵)/√2`, `η† = adjoint(η)`.
pub fn build_eta(g: &GammaSet) -> EtaSet {
    let eta = (&g.gamma[0] + &g.gamma5.scale(c64(0.0, 1.0))).scale_real(FRAC_1_SQRT_2);
    EtaSet::from_eta(eta)
}

/// One verified identity.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_deviation,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.max_deviation.is_finite() && self.max_deviation <= self.tolerance
    }
}

/// Ordered list of identity checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn push(&mut self, name: impl Into<String>, deviation: f64, tolerance: f64) {
        self.checks
            .push(IdentityCheck::new(name, deviation, tolerance));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_deviation)
            .fold(0.0, f64::max)
    }

    pub fn extend(&mut self, other: IdentityReport) {
        self.checks.extend(other.checks);
    }
}

/// Nilpotency and the η/γ relations. Listed first so that a corrupted η is
/// reported by its nilpotency failure.
pub fn eta_identities(g: &GammaSet, e: &EtaSet) -> IdentityReport {
    let mut rep = IdentityReport::default();
    let zero = ComplexMatrix::zeros(4, 4);
    let id = ComplexMatrix::identity(4);
    rep.push(
        "eta nilpotency",
        (&e.eta * &e.eta).max_abs_diff(&zero),
        IDENTITY_TOL,
    );
    rep.push(
        "eta-dagger nilpotency",
        (&e.eta_dagger * &e.eta_dagger).max_abs_diff(&zero),
        IDENTITY_TOL,
    );
    rep.push(
        "eta anticommutator {eta, eta-dagger} = 2I",
        e.eta
            .anticommutator(&e.eta_dagger)
            .max_abs_diff(&id.scale_real(2.0)),
        IDENTITY_TOL,
    );
    rep.push(
        "(eta + eta-dagger)/sqrt2 = gamma0",
        (&e.eta + &e.eta_dagger)
            .scale_real(FRAC_1_SQRT_2)
            .max_abs_diff(&g.gamma[0]),
        IDENTITY_TOL,
    );
    rep.push(
        "(eta - eta-dagger)/sqrt2 = i gamma5",
        (&e.eta - &e.eta_dagger)
            .scale_real(FRAC_1_SQRT_2)
            .max_abs_diff(&g.gamma5.scale(c64(0.0, 1.0))),
        IDENTITY_TOL,
    );
    rep
}

/// The Clifford relations and γ⁵ properties.
pub fn gamma_identities(g: &GammaSet) -> IdentityReport {
    let mut rep = IdentityReport::default();
    let id = ComplexMatrix::identity(4);
    for mu in 0..4 {
        for nu in mu..4 {
            let expected = if mu == nu {
                id.scale_real(2.0 * METRIC[mu])
            } else {
                ComplexMatrix::zeros(4, 4)
            };
            rep.push(
                format!("anticommutator {{gamma{mu}, gamma{nu}}}"),
                g.gamma[mu]
                    .anticommutator(&g.gamma[nu])
                    .max_abs_diff(&expected),
                IDENTITY_TOL,
            );
        }
    }
    rep.push(
        "gamma5 = i gamma0 gamma1 gamma2 gamma3",
        g.chirality_product().max_abs_diff(&g.gamma5),
        IDENTITY_TOL,
    );
    rep.push(
        "gamma0 hermitian",
        g.gamma[0].adjoint().max_abs_diff(&g.gamma[0]),
        IDENTITY_TOL,
    );
    rep.push(
        "gamma5 hermitian",
        g.gamma5.adjoint().max_abs_diff(&g.gamma5),
        IDENTITY_TOL,
    );
    for mu in 0..4 {
        rep.push(
            format!("{{gamma5, gamma{mu}}} = 0"),
            g.gamma5.anticommutator(&g.gamma[mu]).max_abs(),
            IDENTITY_TOL,
        );
    }
    rep
}

/// Every invariant of [`GammaSet`] and [`EtaSet`], η relations first.
pub fn identity_suite(g: &GammaSet, e: &EtaSet) -> IdentityReport {
    let mut rep = eta_identities(g, e);
    rep.extend(gamma_identities(g));
    rep
}

/// Field redefinition `ψ = Mψ'` with `M = (1 − iγ⁵)/√2` maps
/// `(iγ^μ∂_μ − iγ⁵m)ψ = 0` to the standard `(iγ^μ∂_μ − m)ψ' = 0` after a
/// left multiplication by `M`.
pub fn footnote_equivalence_check(g: &GammaSet) -> IdentityReport {
    let mut rep = IdentityReport::default();
    let id = ComplexMatrix::identity(4);
    let i_g5 = g.gamma5.scale(c64(0.0, 1.0));
    let m = (&id - &i_g5).scale_real(FRAC_1_SQRT_2);
    rep.push(
        "M^2 = -i gamma5",
        (&m * &m).max_abs_diff(&(-&i_g5)),
        IDENTITY_TOL,
    );
    for mu in 0..4 {
        rep.push(
            format!("M gamma{mu} M = gamma{mu}"),
            (&(&m * &g.gamma[mu]) * &m).max_abs_diff(&g.gamma[mu]),
            IDENTITY_TOL,
        );
    }
    rep.push(
        "M (-i gamma5) M = -I",
        (&(&m * &(-&i_g5)) * &m).max_abs_diff(&(-&id)),
        IDENTITY_TOL,
    );
    rep
}

/// Unitary built as a product of Householder reflections `I − 2vv†/‖v‖²`.
pub fn householder_unitary(vectors: &[[Complex; 4]]) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(4);
    for v in vectors {
        let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let h = ComplexMatrix::from_fn(4, 4, |r, c| {
            let delta = if r == c { 1.0 } else { 0.0 };
            c64(delta, 0.0) - v[r] * v[c].conj() * (2.0 / n2)
        });
        u = &u * &h;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clifford_squares() {
        let g = build_standard_gammas();
        let id = ComplexMatrix::identity(4);
        assert!((&g.gamma[0] * &g.gamma[0]).max_abs_diff(&id) < IDENTITY_TOL);
        assert!((&g.gamma[1] * &g.gamma[1]).max_abs_diff(&(-&id)) < IDENTITY_TOL);
        assert!(g.chirality_product().max_abs_diff(&g.gamma5) < IDENTITY_TOL);
    }

    #[test]
    fn gamma0_is_diagonal_in_standard_rep() {
        let g = build_standard_gammas();
        let diag: Vec<f64> = (0..4).map(|i| g.gamma[0][(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn eta_is_nilpotent_and_recovers_gammas() {
        let g = build_standard_gammas();
        let e = build_eta(&g);
        assert!((&e.eta * &e.eta).max_abs() < 1e-16);
        assert!(
            (&e.eta + &e.eta_dagger)
                .scale_real(FRAC_1_SQRT_2)
                .max_abs_diff(&g.gamma[0])
                < IDENTITY_TOL
        );
        let two = ComplexMatrix::identity(4).scale_real(2.0);
        assert!(e.eta.anticommutator(&e.eta_dagger).max_abs_diff(&two) < IDENTITY_TOL);
    }

    #[test]
    fn adjoint_of_eta_is_gamma0_minus_i_gamma5() {
        let g = build_standard_gammas();
        let e = build_eta(&g);
        let expected = (&g.gamma[0] - &g.gamma5.scale(c64(0.0, 1.0))).scale_real(FRAC_1_SQRT_2);
        assert!(e.eta_dagger.max_abs_diff(&expected) < IDENTITY_TOL);
    }

    #[test]
    fn footnote_transform() {
        let g = build_standard_gammas();
        let rep = footnote_equivalence_check(&g);
        assert!(rep.all_passed(), "{rep:?}");
        assert_eq!(rep.checks.len(), 6);
    }

    #[test]
    fn standard_suite_passes() {
        let g = build_standard_gammas();
        let rep = identity_suite(&g, &build_eta(&g));
        assert!(rep.all_passed(), "{:?}", rep.first_failure());
        let anti = rep
            .checks
            .iter()
            .filter(|c| c.name.starts_with("anticommutator"))
            .count();
        assert_eq!(anti, 10);
    }

    #[test]
    fn swapped_gammas_fail_the_chirality_identity() {
        let mut g = build_standard_gammas();
        g.gamma.swap(1, 2);
        let rep = identity_suite(&g, &build_eta(&g));
        assert!(!rep.all_passed());
        // The anticommutators are symmetric under the swap; γ⁵ = iγ⁰γ¹γ²γ³ flips sign.
        assert_eq!(
            rep.first_failure().unwrap().name,
            "gamma5 = i gamma0 gamma1 gamma2 gamma3"
        );
    }

    #[test]
    fn corrupted_eta_fails_on_nilpotency() {
        let g = build_standard_gammas();
        let mut eta = build_eta(&g).eta;
        eta[(0, 2)] = -eta[(0, 2)];
        let rep = identity_suite(&g, &EtaSet::from_eta(eta));
        assert_eq!(rep.first_failure().unwrap().name, "eta nilpotency");
    }

    #[test]
    fn unitary_conjugation_preserves_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let vs: Vec<[Complex; 4]> = (0..3)
                .map(|_| {
                    std::array::from_fn(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                })
                .collect();
            let u = householder_unitary(&vs);
            assert!((&u * &u.adjoint()).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
            let g = build_standard_gammas().conjugated(&u);
            let rep = identity_suite(&g, &build_eta(&g));
            // Conjugation adds a few ulps per product.
            assert!(rep.max_deviation() < 1e-14, "{:?}", rep);
            assert!(footnote_equivalence_check(&g).all_passed());
        }
    }
}
