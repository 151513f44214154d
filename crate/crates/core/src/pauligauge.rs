//! Gauge-covariant momentum on a cubic lattice and the Pauli-Hamiltonian
//! identity `(σ·Π)² = Π² − eσ·B` it produces.
//!
//! `Π_a = −i∂_a − eA_a` uses centred differences with periodic wrap. Grid
//! points sit at `x_i = (i − N/2)h`, so the origin is a lattice site.
//!
//! A field that is not periodic (uniform B in the symmetric gauge) is
//! declared [`Boundary::Open`]: the stencil still wraps, but every norm and
//! sum is restricted to sites at least `margin` cells away from a face, where
//! no wrapped value can reach.

use rayon::prelude::*;
use thiserror::Error;

use crate::clifford::{build_eta, build_standard_gammas, GammaSet};
use crate::numerics::{c64, Complex, ComplexMatrix};

/// Smallest supported lattice extent.
pub const MIN_EXTENT: usize = 8;
/// Margin for two stacked applications of the centred stencil.
pub const STENCIL_MARGIN: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("grid needs N ≥ {MIN_EXTENT} and h > 0, got N = {n}, h = {h}")]
    BadGrid { n: usize, h: f64 },
    #[error("field is not periodic across the boundary along axis {axis}: jump {jump:.3e}")]
    PreconditionViolation { axis: usize, jump: f64 },
    #[error("sample count {got} does not match the grid ({expected})")]
    SizeMismatch { expected: usize, got: usize },
    #[error("interior margin {margin} leaves no sites on an N = {n} grid")]
    EmptyInterior { margin: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
}

impl Grid {
    pub fn new(n: usize, h: f64) -> Result<Self, PauliError> {
        if n < MIN_EXTENT || !(h > 0.0 && h.is_finite()) {
            return Err(PauliError::BadGrid { n, h });
        }
        Ok(Self { n, h })
    }

    /// Grid with `n` sites per axis spanning a box of side `box_length`.
    pub fn with_box(n: usize, box_length: f64) -> Result<Self, PauliError> {
        Self::new(n, box_length / n as f64)
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn box_length(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn site(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let half = (self.n / 2) as f64;
        self.site(idx).map(|i| (i as f64 - half) * self.h)
    }

    pub fn origin(&self) -> usize {
        let c = self.n / 2;
        self.index(c, c, c)
    }

    /// Neighbour one step along `axis` (`forward` or backward), wrapped.
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> usize {
        let mut s = self.site(idx);
        s[axis] = if forward {
            (s[axis] + 1) % self.n
        } else {
            (s[axis] + self.n - 1) % self.n
        };
        self.index(s[0], s[1], s[2])
    }

    pub fn is_interior(&self, idx: usize, margin: usize) -> bool {
        self.site(idx)
            .iter()
            .all(|&i| i >= margin && i + margin < self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open { margin: usize },
}

/// `A⁰`, `A` sampled on the grid and the analytic `B = ∇×A`.
#[derive(Clone, Debug)]
pub struct GaugeField {
    pub grid: Grid,
    pub a0: Vec<f64>,
    pub a: Vec<[f64; 3]>,
    pub b: Vec<[f64; 3]>,
    pub boundary: Boundary,
}

type Profile3<'a> = &'a (dyn Fn([f64; 3]) -> [f64; 3] + Sync);
type Profile1<'a> = &'a (dyn Fn([f64; 3]) -> f64 + Sync);

fn seam_jump(grid: &Grid, f: &dyn Fn([f64; 3]) -> Vec<f64>) -> Option<(usize, f64)> {
    let l = grid.box_length();
    let mut scale = 1.0_f64;
    let mut worst: Option<(usize, f64)> = None;
    for idx in 0..grid.len() {
        let x = grid.coords(idx);
        let here = f(x);
        scale = scale.max(here.iter().fold(0.0, |m, v| m.max(v.abs())));
        for axis in 0..3 {
            if grid.site(idx)[axis] != 0 {
                continue;
            }
            let mut y = x;
            y[axis] += l;
            let jump = f(y)
                .iter()
                .zip(&here)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            if worst.map_or(true, |(_, w)| jump > w) {
                worst = Some((axis, jump));
            }
        }
    }
    worst.map(|(axis, jump)| (axis, jump / scale))
}

impl GaugeField {
    /// Samples analytic profiles. With [`Boundary::Periodic`] the profiles
    /// must repeat with the box period (checked on every boundary face).
    pub fn from_fn(
        grid: Grid,
        a0: Profile1,
        a: Profile3,
        b: Profile3,
        boundary: Boundary,
    ) -> Result<Self, PauliError> {
        match boundary {
            Boundary::Periodic => {
                let both = |x: [f64; 3]| {
                    let v = a(x);
                    vec![a0(x), v[0], v[1], v[2]]
                };
                if let Some((axis, jump)) = seam_jump(&grid, &both) {
                    if jump > 1e-9 {
                        return Err(PauliError::PreconditionViolation { axis, jump });
                    }
                }
            }
            Boundary::Open { margin } => {
                if 2 * margin >= grid.n {
                    return Err(PauliError::EmptyInterior { margin, n: grid.n });
                }
            }
        }
        let xs: Vec<[f64; 3]> = (0..grid.len()).map(|i| grid.coords(i)).collect();
        Ok(Self {
            grid,
            a0: xs.iter().map(|&x| a0(x)).collect(),
            a: xs.iter().map(|&x| a(x)).collect(),
            b: xs.iter().map(|&x| b(x)).collect(),
            boundary,
        })
    }

    pub fn zero(grid: Grid) -> Self {
        let len = grid.len();
        Self {
            grid,
            a0: vec![0.0; len],
            a: vec![[0.0; 3]; len],
            b: vec![[0.0; 3]; len],
            boundary: Boundary::Periodic,
        }
    }

    /// Uniform `B ẑ` in the symmetric gauge `A = (−By/2, Bx/2, 0)`.
    pub fn uniform_b(grid: Grid, bz: f64) -> Self {
        Self::from_fn(
            grid,
            &|_| 0.0,
            &|x| [-0.5 * bz * x[1], 0.5 * bz * x[0], 0.0],
            &|_| [0.0, 0.0, bz],
            Boundary::Open {
                margin: STENCIL_MARGIN,
            },
        )
        .expect("margin fits every grid with N ≥ 8")
    }

    /// `A = a(sin qy, sin qz, sin qx)`, `A⁰ = a₀ cos qx` with `q = 2π/box`;
    /// `B = −aq(cos qz, cos qx, cos qy)`.
    pub fn smooth_periodic(grid: Grid, amplitude: f64, a0: f64) -> Self {
        let q = 2.0 * std::f64::consts::PI / grid.box_length();
        let a = amplitude;
        Self::from_fn(
            grid,
            &move |x| a0 * (q * x[0]).cos(),
            &move |x| {
                [
                    a * (q * x[1]).sin(),
                    a * (q * x[2]).sin(),
                    a * (q * x[0]).sin(),
                ]
            },
            &move |x| {
                [
                    -a * q * (q * x[2]).cos(),
                    -a * q * (q * x[0]).cos(),
                    -a * q * (q * x[1]).cos(),
                ]
            },
            Boundary::Periodic,
        )
        .expect("profile has the box period")
    }

    /// Sites entering norms and sums.
    pub fn counts(&self, idx: usize) -> bool {
        match self.boundary {
            Boundary::Periodic => true,
            Boundary::Open { margin } => self.grid.is_interior(idx, margin),
        }
    }

    /// `A → A − ∇θ` with the centred-difference gradient; `A⁰` and the
    /// analytic `B` are unchanged (θ is static, ∇×∇θ = 0).
    pub fn gauge_transformed(&self, theta: &[f64]) -> Result<Self, PauliError> {
        if theta.len() != self.grid.len() {
            return Err(PauliError::SizeMismatch {
                expected: self.grid.len(),
                got: theta.len(),
            });
        }
        let g = &self.grid;
        let mut out = self.clone();
        for (idx, a) in out.a.iter_mut().enumerate() {
            for axis in 0..3 {
                let d = (theta[g.neighbor(idx, axis, true)] - theta[g.neighbor(idx, axis, false)])
                    / (2.0 * g.h);
                a[axis] -= d;
            }
        }
        Ok(out)
    }
}

/// Site terms are evaluated in parallel and accumulated in index order, so
/// results do not depend on thread scheduling.
fn ordered_sum(f: &GaugeField, term: impl Fn(usize) -> Complex + Sync + Send) -> Complex {
    let terms: Vec<Complex> = (0..f.grid.len())
        .into_par_iter()
        .map(|i| if f.counts(i) { term(i) } else { c64(0.0, 0.0) })
        .collect();
    terms.iter().sum()
}

/// `C`-component complex field on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<const C: usize> {
    pub grid: Grid,
    pub data: Vec<[Complex; C]>,
}

/// Two-component (Pauli) field.
pub type PauliState = Field<2>;
/// Four-component field.
pub type DiracState = Field<4>;

impl<const C: usize> Field<C> {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![[c64(0.0, 0.0); C]; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [Complex; C] + Sync + Send) -> Self {
        Self {
            grid,
            data: (0..grid.len())
                .into_par_iter()
                .map(|i| f(grid.coords(i)))
                .collect(),
        }
    }

    fn map_sites(&self, f: impl Fn(usize) -> [Complex; C] + Sync + Send) -> Self {
        Self {
            grid: self.grid,
            data: (0..self.grid.len()).into_par_iter().map(f).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `Σ φ†ψ` over the sites counted by `f` (no volume factor).
    pub fn inner(&self, other: &Self, f: &GaugeField) -> Complex {
        ordered_sum(f, |i| {
            self.data[i]
                .iter()
                .zip(&other.data[i])
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex>()
        })
    }

    pub fn norm(&self, f: &GaugeField) -> f64 {
        self.inner(self, f).re.sqrt()
    }

    pub fn axpy(&self, s: Complex, other: &Self) -> Self {
        self.map_sites(|i| std::array::from_fn(|c| self.data[i][c] + s * other.data[i][c]))
    }

    pub fn scaled(&self, s: Complex) -> Self {
        self.map_sites(|i| self.data[i].map(|z| z * s))
    }

    /// Multiplies site `i` by `phase[i]`.
    pub fn phased(&self, phase: &[Complex]) -> Self {
        self.map_sites(|i| self.data[i].map(|z| z * phase[i]))
    }
}

/// `Π_axis ψ = −i(ψ(x+h) − ψ(x−h))/(2h) − eA_axis ψ`.
pub fn covariant_momentum_apply<const C: usize>(
    f: &GaugeField,
    psi: &Field<C>,
    axis: usize,
    e_charge: f64,
) -> Field<C> {
    let g = f.grid;
    let inv = 1.0 / (2.0 * g.h);
    psi.map_sites(|i| {
        let fw = &psi.data[g.neighbor(i, axis, true)];
        let bw = &psi.data[g.neighbor(i, axis, false)];
        let ea = e_charge * f.a[i][axis];
        std::array::from_fn(|c| {
            let d = (fw[c] - bw[c]) * inv;
            c64(d.im, -d.re) - psi.data[i][c] * ea
        })
    })
}

fn pauli(axis: usize) -> [[Complex; 2]; 2] {
    let o = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    match axis {
        0 => [[o, one], [one, o]],
        1 => [[o, -i], [i, o]],
        _ => [[one, o], [o, -one]],
    }
}

fn apply2(m: &[[Complex; 2]; 2], v: &[Complex; 2]) -> [Complex; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// `σ·v` for a real 3-vector.
pub fn sigma_dot(v: [f64; 3]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2, 2);
    for (axis, &c) in v.iter().enumerate() {
        let s = pauli(axis);
        for r in 0..2 {
            for k in 0..2 {
                out[(r, k)] += s[r][k] * c;
            }
        }
    }
    out
}

/// `max |(σ·a)(σ·b) − (a·b)I − iσ·(a×b)|`.
pub fn pauli_product_deviation(a: [f64; 3], b: [f64; 3]) -> f64 {
    let lhs = &sigma_dot(a) * &sigma_dot(b);
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let rhs = &ComplexMatrix::identity(2).scale_real(dot) + &sigma_dot(cross).scale(c64(0.0, 1.0));
    lhs.max_abs_diff(&rhs)
}

/// `(σ·Π)ψ`.
pub fn sigma_pi_apply(f: &GaugeField, psi: &PauliState, e_charge: f64) -> PauliState {
    let parts: Vec<PauliState> = (0..3)
        .map(|a| covariant_momentum_apply(f, psi, a, e_charge))
        .collect();
    psi.map_sites(|i| {
        let mut out = [c64(0.0, 0.0); 2];
        for (axis, p) in parts.iter().enumerate() {
            let v = apply2(&pauli(axis), &p.data[i]);
            out[0] += v[0];
            out[1] += v[1];
        }
        out
    })
}

/// `Π²ψ = Σ_a Π_aΠ_aψ`.
pub fn pi_squared_apply<const C: usize>(f: &GaugeField, psi: &Field<C>, e_charge: f64) -> Field<C> {
    let mut acc = Field::zeros(psi.grid);
    for axis in 0..3 {
        let once = covariant_momentum_apply(f, psi, axis, e_charge);
        let twice = covariant_momentum_apply(f, &once, axis, e_charge);
        acc = acc.axpy(c64(1.0, 0.0), &twice);
    }
    acc
}

/// `‖(σ·Π)²ψ − (Π² − eσ·B)ψ‖ / ‖ψ‖` over the counted sites.
pub fn pauli_identity_check(f: &GaugeField, psi: &PauliState, e_charge: f64) -> f64 {
    let lhs = sigma_pi_apply(f, &sigma_pi_apply(f, psi, e_charge), e_charge);
    let pi2 = pi_squared_apply(f, psi, e_charge);
    let rhs = pi2.map_sites(|i| {
        let sb = apply2(&to_array2(&sigma_dot(f.b[i])), &psi.data[i]);
        [
            pi2.data[i][0] - sb[0] * e_charge,
            pi2.data[i][1] - sb[1] * e_charge,
        ]
    });
    lhs.axpy(c64(-1.0, 0.0), &rhs).norm(f) / psi.norm(f)
}

fn to_array2(m: &ComplexMatrix) -> [[Complex; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

/// `‖[Π_x, Π_y]ψ − ieB_zψ‖ / ‖ψ‖` over the counted sites.
pub fn commutator_check<const C: usize>(f: &GaugeField, psi: &Field<C>, e_charge: f64) -> f64 {
    let xy = covariant_momentum_apply(
        f,
        &covariant_momentum_apply(f, psi, 1, e_charge),
        0,
        e_charge,
    );
    let yx = covariant_momentum_apply(
        f,
        &covariant_momentum_apply(f, psi, 0, e_charge),
        1,
        e_charge,
    );
    let r = psi.map_sites(|i| {
        let ieb = c64(0.0, e_charge * f.b[i][2]);
        std::array::from_fn(|c| xy.data[i][c] - yx.data[i][c] - ieb * psi.data[i][c])
    });
    r.norm(f) / psi.norm(f)
}

/// `Hψ = (σ·Π)²ψ/(2m) + eA⁰ψ`.
pub fn pauli_hamiltonian_apply(
    f: &GaugeField,
    psi: &PauliState,
    mass: f64,
    e_charge: f64,
) -> PauliState {
    let k = sigma_pi_apply(f, &sigma_pi_apply(f, psi, e_charge), e_charge);
    k.map_sites(|i| {
        let v = e_charge * f.a0[i];
        std::array::from_fn(|c| k.data[i][c] / (2.0 * mass) + psi.data[i][c] * v)
    })
}

/// `|⟨φ, Hψ⟩ − ⟨Hφ, ψ⟩| / (‖φ‖‖ψ‖)` summed over the whole (periodic) grid.
pub fn hermiticity_defect(
    f: &GaugeField,
    phi: &PauliState,
    psi: &PauliState,
    mass: f64,
    e_charge: f64,
) -> f64 {
    let all = GaugeField {
        boundary: Boundary::Periodic,
        ..f.clone()
    };
    let a = phi.inner(&pauli_hamiltonian_apply(f, psi, mass, e_charge), &all);
    let b = pauli_hamiltonian_apply(f, phi, mass, e_charge).inner(psi, &all);
    (a - b).norm() / (phi.norm(&all) * psi.norm(&all))
}

/// Energies of the spin-up and spin-down constant spinors at the origin in a
/// uniform field `B ẑ`: `∓eB/(2m)`.
pub fn zeeman_energies(grid: Grid, bz: f64, mass: f64, e_charge: f64) -> (f64, f64) {
    let f = GaugeField::uniform_b(grid, bz);
    let o = grid.origin();
    let energy = |spin: [Complex; 2]| {
        let psi = PauliState::from_fn(grid, |_| spin);
        let h = pauli_hamiltonian_apply(&f, &psi, mass, e_charge);
        let v = h.data[o];
        (spin[0].conj() * v[0] + spin[1].conj() * v[1]).re
    };
    (
        energy([c64(1.0, 0.0), c64(0.0, 0.0)]),
        energy([c64(0.0, 0.0), c64(1.0, 0.0)]),
    )
}

/// `h³ Σ ψ†[(E − eA⁰)η − γ·Π + mη†]ψ`, the bilinear of the gauged first-order
/// equation in the standard representation, over the counted sites.
pub fn bilinear(
    f: &GaugeField,
    psi: &DiracState,
    energy: f64,
    mass: f64,
    e_charge: f64,
) -> Complex {
    bilinear_with(f, psi, energy, mass, e_charge, &build_standard_gammas())
}

fn bilinear_with(
    f: &GaugeField,
    psi: &DiracState,
    energy: f64,
    mass: f64,
    e_charge: f64,
    g: &GammaSet,
) -> Complex {
    let eta = build_eta(g);
    let pis: Vec<DiracState> = (0..3)
        .map(|a| covariant_momentum_apply(f, psi, a, e_charge))
        .collect();
    let mul = |m: &ComplexMatrix, v: &[Complex; 4]| -> [Complex; 4] {
        std::array::from_fn(|r| (0..4).map(|c| m[(r, c)] * v[c]).sum())
    };
    let h3 = f.grid.h.powi(3);
    let total = ordered_sum(f, |i| {
        let u = &psi.data[i];
        let a = mul(&eta.eta, u);
        let b = mul(&eta.eta_dagger, u);
        let w = energy - e_charge * f.a0[i];
        let mut v: [Complex; 4] = std::array::from_fn(|r| a[r] * w + b[r] * mass);
        for (axis, p) in pis.iter().enumerate() {
            let gp = mul(&g.gamma[axis + 1], &p.data[i]);
            for r in 0..4 {
                v[r] -= gp[r];
            }
        }
        (0..4).map(|r| u[r].conj() * v[r]).sum::<Complex>()
    });
    total * h3
}

/// `|Q[e^{−ieθ}ψ, A − ∇θ] − Q[ψ, A]| / (h³Σ|ψ|²)`.
pub fn gauge_invariance_check(
    f: &GaugeField,
    theta: &[f64],
    psi: &DiracState,
    energy: f64,
    mass: f64,
    e_charge: f64,
) -> Result<f64, PauliError> {
    let f2 = f.gauge_transformed(theta)?;
    let phase: Vec<Complex> = theta
        .iter()
        .map(|&t| Complex::from_polar(1.0, -e_charge * t))
        .collect();
    let psi2 = psi.phased(&phase);
    let q1 = bilinear(f, psi, energy, mass, e_charge);
    let q2 = bilinear(&f2, &psi2, energy, mass, e_charge);
    let norm = psi.inner(psi, f).re * f.grid.h.powi(3);
    Ok((q2 - q1).norm() / norm)
}

/// Smooth periodic two-component test state
/// `exp(κ Σ cos qx_j) e^{iq(l·x)} χ` with `q = 2π/box`.
pub fn periodic_state<const C: usize>(
    grid: Grid,
    kappa: f64,
    wave: [i32; 3],
    spin: [Complex; C],
) -> Field<C> {
    let q = 2.0 * std::f64::consts::PI / grid.box_length();
    Field::from_fn(grid, move |x| {
        let env = (kappa * (0..3).map(|j| (q * x[j]).cos()).sum::<f64>()).exp();
        let ph = q * (0..3).map(|j| wave[j] as f64 * x[j]).sum::<f64>();
        let z = Complex::from_polar(env, ph);
        spin.map(|s| s * z)
    })
}

/// Gaussian packet `exp(−|x|²/(2w²)) e^{ik·x} χ` centred at the origin.
pub fn gaussian_state<const C: usize>(
    grid: Grid,
    width: f64,
    k: [f64; 3],
    spin: [Complex; C],
) -> Field<C> {
    Field::from_fn(grid, move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let z = Complex::from_polar(
            (-r2 / (2.0 * width * width)).exp(),
            k[0] * x[0] + k[1] * x[1] + k[2] * x[2],
        );
        spin.map(|s| s * z)
    })
}

/// Parameters of the residual-versus-spacing study.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    /// Side of the fixed box, nm.
    pub box_length: f64,
    /// Sites per axis, coarsest first.
    pub extents: Vec<usize>,
    pub bz: f64,
    pub e_charge: f64,
    pub energy: f64,
    pub mass: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            box_length: 8.0,
            extents: vec![32, 64, 128],
            bz: 0.8,
            e_charge: 1.0,
            energy: 0.5,
            mass: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub identity: f64,
    pub gauge: f64,
    pub commutator: f64,
}

fn test_spin2() -> [Complex; 2] {
    [c64(0.8, 0.0), c64(0.36, 0.48)]
}

fn test_spin4() -> [Complex; 4] {
    [
        c64(0.6, 0.0),
        c64(0.0, 0.4),
        c64(0.48, -0.2),
        c64(-0.3, 0.34),
    ]
}

/// One row per extent at fixed box size:
/// identity and commutator residuals for uniform `B ẑ` on a Gaussian packet,
/// gauge deviation for `θ = sin(2πx/box)` with the smooth periodic field.
pub fn convergence_table(cfg: &ConvergenceConfig) -> Result<Vec<ConvergenceRow>, PauliError> {
    cfg.extents
        .iter()
        .map(|&n| {
            let grid = Grid::with_box(n, cfg.box_length)?;
            let uniform = GaugeField::uniform_b(grid, cfg.bz);
            let packet = gaussian_state(grid, 1.0, [1.3, -0.7, 0.4], test_spin2());
            let identity = pauli_identity_check(&uniform, &packet, cfg.e_charge);
            let commutator = commutator_check(&uniform, &packet, cfg.e_charge);
            let smooth = GaugeField::smooth_periodic(grid, 0.6, 0.3);
            let q = 2.0 * std::f64::consts::PI / grid.box_length();
            let theta: Vec<f64> = (0..grid.len())
                .map(|i| (q * grid.coords(i)[0]).sin())
                .collect();
            let psi = periodic_state(grid, 0.7, [1, -1, 2], test_spin4());
            let gauge =
                gauge_invariance_check(&smooth, &theta, &psi, cfg.energy, cfg.mass, cfg.e_charge)?;
            Ok(ConvergenceRow {
                h: grid.h,
                identity,
                gauge,
                commutator,
            })
        })
        .collect()
}

/// `log₂(rᵢ/rᵢ₊₁) / log₂(hᵢ/hᵢ₊₁)` for consecutive refinements.
pub fn convergence_orders(hs: &[f64], residuals: &[f64]) -> Vec<f64> {
    hs.windows(2)
        .zip(residuals.windows(2))
        .map(|(h, r)| (r[0] / r[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}
