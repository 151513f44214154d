//! Spin-resolved scattering off a rectangular barrier and a potential step.
//!
//! ```text
//!   region I  (z < 0)      V = 0    A u↑₊ e^{ip₁z} + A′ u↑₋ e^{−ip₁z} + B′ u↓₋ e^{−ip₁z}
//!   region II (0 < z < L)  V = V₀   F u↑₊ + G u↓₊ + F′ u↑₋ + G′ u↓₋   (plane or evanescent)
//!   region III (z > L)     V = 0    C u↑₊ e^{ip₁z} + D u↓₊ e^{ip₁z}
//! ```
//!
//! `A = 1` and ψ is continuous at `z = 0` and `z = L`. All modes in regions
//! I and III carry the same current magnitude, so `T₁ = |C|²`, `T₂ = |D|²`,
//! `R₁ = |A′|²`, `R₂ = |B′|²`. Coefficients are labelled by the outgoing spin.

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{c64, solve_linear, Complex, ComplexMatrix, ComplexVector, NumericsError};
use crate::spinors::{
    probability_current, region_basis, Spin, Spinor, SpinorConvention, SpinorError,
    RHO_SINGULAR_RTOL,
};
use crate::waveop::{classify, critical_width, PhysicalConstants, Regime};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("V0 − E = {gap} lies within 1e-6·m of m: evanescent normalisation diverges")]
    RhoSingular { gap: f64 },
    #[error(
        "|E − V0| = {distance:.3e} is inside the critical band ({width:.3e}); use the series limit"
    )]
    CriticalBand { distance: f64, width: f64 },
    #[error("degenerate matching system: {0}")]
    Degenerate(NumericsError),
    #[error(transparent)]
    Spinor(#[from] SpinorError),
}

impl From<NumericsError> for ScatteringError {
    fn from(e: NumericsError) -> Self {
        ScatteringError::Degenerate(e)
    }
}

/// Piece of a piecewise-constant potential, `[start, end)` in nm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub potential: f64,
    pub start: f64,
    pub end: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierProblem {
    pub energy: f64,
    pub v0: f64,
    pub length: f64,
    pub incident: Spin,
    pub constants: PhysicalConstants,
}

fn positive(name: &'static str, value: f64) -> Result<(), ScatteringError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ScatteringError::NonPositive { name, value })
    }
}

impl BarrierProblem {
    pub fn new(
        energy: f64,
        v0: f64,
        length: f64,
        incident: Spin,
        constants: PhysicalConstants,
    ) -> Result<Self, ScatteringError> {
        positive("E", energy)?;
        positive("V0", v0)?;
        positive("L", length)?;
        let m = constants.mass_c2;
        let gap = v0 - energy;
        if (gap - m).abs() <= RHO_SINGULAR_RTOL * m {
            return Err(ScatteringError::RhoSingular { gap });
        }
        Ok(Self {
            energy,
            v0,
            length,
            incident,
            constants,
        })
    }

    pub fn mass(&self) -> f64 {
        self.constants.mass_c2
    }

    pub fn regime(&self) -> Regime {
        classify(self.energy, self.v0)
    }

    pub fn regions(&self) -> [Region; 3] {
        [
            Region {
                potential: 0.0,
                start: f64::NEG_INFINITY,
                end: 0.0,
            },
            Region {
                potential: self.v0,
                start: 0.0,
                end: self.length,
            },
            Region {
                potential: 0.0,
                start: self.length,
                end: f64::INFINITY,
            },
        ]
    }

    /// `L√(2m|E − V₀|)/ħc`, the region-II phase (or decay exponent κL).
    pub fn barrier_phase(&self) -> f64 {
        phase(
            self.energy - self.v0,
            self.mass(),
            self.length,
            self.constants.hbar_c,
        )
    }

    /// `L√(2mE)/ħc`.
    pub fn outer_phase(&self) -> f64 {
        phase(self.energy, self.mass(), self.length, self.constants.hbar_c)
    }
}

/// `L√(2m|W|)/ħc`. The single definition used by both solvers.
pub fn phase(kinetic: f64, mass: f64, length: f64, hbar_c: f64) -> f64 {
    length * (2.0 * mass * kinetic.abs()).sqrt() / hbar_c
}

/// Amplitudes in the conventions of the module docs (`A = 1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitudes {
    pub a: Complex,
    pub a_prime: Complex,
    pub b_prime: Complex,
    pub f: Complex,
    pub g: Complex,
    pub f_prime: Complex,
    pub g_prime: Complex,
    pub c: Complex,
    pub d: Complex,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub t1: f64,
    pub t2: f64,
    pub r1: f64,
    pub r2: f64,
    pub t_qm: f64,
    pub r_qm: f64,
}

impl Coefficients {
    pub fn new(t1: f64, t2: f64, r1: f64, r2: f64) -> Self {
        Self {
            t1,
            t2,
            r1,
            r2,
            t_qm: t1 + t2,
            r_qm: r1 + r2,
        }
    }

    pub fn sum(&self) -> f64 {
        self.t1 + self.t2 + self.r1 + self.r2
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.t1, self.t2, self.r1, self.r2]
    }

    /// Exchange the spin labels (up ↔ down) of the outgoing channels.
    pub fn spin_swapped(&self) -> Self {
        Self::new(self.t2, self.t1, self.r2, self.r1)
    }

    /// `max |aᵢ − bᵢ|` over the four channels.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `max |aᵢ − bᵢ| / |bᵢ|` over the channels where `bᵢ ≠ 0`; channels
    /// where `bᵢ = 0` contribute `|aᵢ|`.
    pub fn max_rel_diff(&self, reference: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(reference.as_array())
            .map(|(a, b)| {
                if b == 0.0 {
                    a.abs()
                } else {
                    (a - b).abs() / b.abs()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
}

/// Position-dependent factors of the region-II modes, anchored so that only
/// decaying exponentials appear: `(+ mode at 0, + at L, − at 0, − at L)`.
fn region_two_factors(p: &BarrierProblem) -> [Complex; 4] {
    let th = p.barrier_phase();
    match p.regime() {
        Regime::Evanescent => {
            let d = c64((-th).exp(), 0.0);
            [c64(1.0, 0.0), d, d, c64(1.0, 0.0)]
        }
        _ => [
            c64(1.0, 0.0),
            Complex::from_polar(1.0, th),
            c64(1.0, 0.0),
            Complex::from_polar(1.0, -th),
        ],
    }
}

struct Bases {
    outer: [Spinor; 4],
    inner: [Spinor; 4],
}

fn bases(p: &BarrierProblem) -> Result<Bases, ScatteringError> {
    let conv = SpinorConvention::default();
    Ok(Bases {
        outer: region_basis(p.energy, 0.0, p.mass(), &conv)?,
        inner: region_basis(p.energy, p.v0, p.mass(), &conv)?,
    })
}

fn incident_index(spin: Spin) -> usize {
    match spin {
        Spin::Up => 0,
        Spin::Down => 1,
    }
}

/// Solution in anchored variables `[A′, B′, F, G, F′, G′, C, D]`, with
/// region-II "−" modes anchored at `z = L` when evanescent and region III
/// anchored at `z = L`.
fn solve_anchored(
    p: &BarrierProblem,
    scales: &[Complex; 8],
) -> Result<(Bases, [Complex; 8]), ScatteringError> {
    if p.regime() == Regime::Critical {
        return Err(ScatteringError::CriticalBand {
            distance: (p.energy - p.v0).abs(),
            width: critical_width(p.energy, p.v0),
        });
    }
    let b = bases(p)?;
    let [f0, fl, g0, gl] = region_two_factors(p);
    let col = |s: &Spinor| s.matching_components().clone();
    let zero = ComplexVector::zeros(4);
    let neg = |v: ComplexVector| v.scale(c64(-1.0, 0.0));
    // Column j: (rows at z = 0 ; rows at z = L).
    let columns: [(ComplexVector, ComplexVector); 8] = [
        (col(&b.outer[2]), zero.clone()),
        (col(&b.outer[3]), zero.clone()),
        (neg(col(&b.inner[0]).scale(f0)), col(&b.inner[0]).scale(fl)),
        (neg(col(&b.inner[1]).scale(f0)), col(&b.inner[1]).scale(fl)),
        (neg(col(&b.inner[2]).scale(g0)), col(&b.inner[2]).scale(gl)),
        (neg(col(&b.inner[3]).scale(g0)), col(&b.inner[3]).scale(gl)),
        (zero.clone(), neg(col(&b.outer[0]))),
        (zero.clone(), neg(col(&b.outer[1]))),
    ];
    let mut m = ComplexMatrix::zeros(8, 8);
    let mut equilibration = [0.0; 8];
    for (j, (top, bottom)) in columns.iter().enumerate() {
        for r in 0..4 {
            m[(r, j)] = top[r] * scales[j];
            m[(r + 4, j)] = bottom[r] * scales[j];
        }
        let mx = (0..8).map(|r| m[(r, j)].norm()).fold(0.0, f64::max);
        equilibration[j] = 1.0 / mx;
        for r in 0..8 {
            m[(r, j)] *= equilibration[j];
        }
    }
    let inc = col(&b.outer[incident_index(p.incident)]);
    let mut rhs = ComplexVector::zeros(8);
    for r in 0..4 {
        rhs[r] = -inc[r];
    }
    let y = solve_linear(&m, &rhs)?;
    let mut x = [c64(0.0, 0.0); 8];
    for j in 0..8 {
        // Amplitude of the unscaled basis column.
        x[j] = y[j] * equilibration[j] * scales[j];
    }
    Ok((b, x))
}

fn coefficients_from(x: &[Complex; 8]) -> Coefficients {
    Coefficients::new(
        x[6].norm_sqr(),
        x[7].norm_sqr(),
        x[0].norm_sqr(),
        x[1].norm_sqr(),
    )
}

fn to_named_amplitudes(p: &BarrierProblem, x: &[Complex; 8]) -> Amplitudes {
    let back = match p.regime() {
        Regime::Evanescent => c64((-p.barrier_phase()).exp(), 0.0),
        _ => c64(1.0, 0.0),
    };
    let out = Complex::from_polar(1.0, -p.outer_phase());
    Amplitudes {
        a: c64(1.0, 0.0),
        a_prime: x[0],
        b_prime: x[1],
        f: x[2],
        g: x[3],
        f_prime: x[4] * back,
        g_prime: x[5] * back,
        c: x[6] * out,
        d: x[7] * out,
    }
}

/// Interface-matching solve of the 8×8 continuity system.
///
/// The incident amplitude is `A = 1` in the channel of `p.incident`. Refuses
/// the critical band, where the region-II basis degenerates.
pub fn solve_barrier(p: &BarrierProblem) -> Result<(Amplitudes, Coefficients), ScatteringError> {
    solve_barrier_scaled(p, &[c64(1.0, 0.0); 8])
}

/// [`solve_barrier`] with each unknown's basis column multiplied by
/// `scales[j]`; the returned amplitudes refer to the unscaled basis.
pub fn solve_barrier_scaled(
    p: &BarrierProblem,
    scales: &[Complex; 8],
) -> Result<(Amplitudes, Coefficients), ScatteringError> {
    let (_, x) = solve_anchored(p, scales)?;
    Ok((to_named_amplitudes(p, &x), coefficients_from(&x)))
}

impl Amplitudes {
    /// `max |ψ_left − ψ_right|` at both interfaces relative to the largest
    /// single term entering the comparison.
    pub fn continuity_residual(&self, p: &BarrierProblem) -> Result<f64, ScatteringError> {
        let b = bases(p)?;
        let th = p.barrier_phase();
        let (fl, g0, gl) = match p.regime() {
            Regime::Evanescent => (c64((-th).exp(), 0.0), c64(1.0, 0.0), c64(th.exp(), 0.0)),
            _ => (
                Complex::from_polar(1.0, th),
                c64(1.0, 0.0),
                Complex::from_polar(1.0, -th),
            ),
        };
        let e1 = Complex::from_polar(1.0, p.outer_phase());
        let inc = b.outer[incident_index(p.incident)].components();
        let u = |s: &Spinor| s.components().clone();
        let left0 = [
            inc.clone(),
            u(&b.outer[2]).scale(self.a_prime),
            u(&b.outer[3]).scale(self.b_prime),
        ];
        let right0 = [
            u(&b.inner[0]).scale(self.f),
            u(&b.inner[1]).scale(self.g),
            u(&b.inner[2]).scale(self.f_prime * g0),
            u(&b.inner[3]).scale(self.g_prime * g0),
        ];
        let left_l = [
            u(&b.inner[0]).scale(self.f * fl),
            u(&b.inner[1]).scale(self.g * fl),
            u(&b.inner[2]).scale(self.f_prime * gl),
            u(&b.inner[3]).scale(self.g_prime * gl),
        ];
        let right_l = [
            u(&b.outer[0]).scale(self.c * e1),
            u(&b.outer[1]).scale(self.d * e1),
        ];
        let mut scale = 0.0_f64;
        let mut worst = 0.0_f64;
        for (lhs, rhs) in [(&left0[..], &right0[..]), (&left_l[..], &right_l[..])] {
            let mut diff = ComplexVector::zeros(4);
            for v in lhs {
                scale = scale.max(v.norm_inf());
                for r in 0..4 {
                    diff[r] += v[r];
                }
            }
            for v in rhs {
                scale = scale.max(v.norm_inf());
                for r in 0..4 {
                    diff[r] -= v[r];
                }
            }
            worst = worst.max(diff.norm_inf());
        }
        Ok(worst / scale)
    }
}

/// Limit value of `T₁` at `E = V₀`: `2E / (2E + mV₀²L²/ħc²)`.
pub fn barrier_top_limit(energy: f64, v0: f64, length: f64, constants: &PhysicalConstants) -> f64 {
    let m = constants.mass_c2;
    let l2 = (length / constants.hbar_c).powi(2);
    2.0 * energy / (2.0 * energy + m * v0 * v0 * l2)
}

/// Closed-form coefficients for incident spin up, with `x = L√(2m|E−V₀|)/ħc`:
///
/// ```text
///   E > V₀:  T₁ = 8E(E−V₀)/D,  D = 8E² − V₀² cos 2x − 8EV₀ + V₀²
///            R₁ = 2V₀²(E−m)² sin²x / ((E+m)² D)
///            R₂ = 8EmV₀² sin²x / ((E+m)² D)
///   E < V₀:  cos → cosh, sin² → −sinh²
///   T₂ = 0
/// ```
///
/// `D` is evaluated as `8E(E−V₀) + 2V₀² sin²x` (resp. `− 2V₀² sinh²x`),
/// which avoids the cancellation in `1 − cos 2x`. For `x > 20` the hyperbolic
/// forms are divided through by `sinh²x` so that `κL` up to ~700 and beyond
/// stay finite. Inside the critical band the second-order series in
/// `u = 2m(E−V₀)L²/ħc²` bridges both branches:
/// `sin²x/(E−V₀) ≈ (2mL²/ħc²)(1 − u/3)`.
pub fn closed_form(p: &BarrierProblem) -> Coefficients {
    let c = closed_form_spin_up(p, p.regime());
    match p.incident {
        Spin::Up => c,
        Spin::Down => c.spin_swapped(),
    }
}

fn closed_form_spin_up(p: &BarrierProblem, regime: Regime) -> Coefficients {
    let (e, v0, m) = (p.energy, p.v0, p.mass());
    let delta = e - v0;
    let em2 = (e - m).powi(2);
    let ep2 = (e + m).powi(2);
    let v02 = v0 * v0;
    let x = p.barrier_phase();
    match regime {
        Regime::Critical => {
            let l2 = (p.length / p.constants.hbar_c).powi(2);
            let u = 2.0 * m * delta * l2;
            // s = sin²x / (E − V₀), continued through both branches.
            let s = 2.0 * m * l2 * (1.0 - u / 3.0);
            let den = 8.0 * e + 2.0 * v02 * s;
            Coefficients::new(
                8.0 * e / den,
                0.0,
                2.0 * v02 * em2 * s / (ep2 * den),
                8.0 * e * m * v02 * s / (ep2 * den),
            )
        }
        Regime::Propagating => {
            let s2 = x.sin().powi(2);
            let den = 8.0 * e * delta + 2.0 * v02 * s2;
            Coefficients::new(
                8.0 * e * delta / den,
                0.0,
                2.0 * v02 * em2 * s2 / (ep2 * den),
                8.0 * e * m * v02 * s2 / (ep2 * den),
            )
        }
        Regime::Evanescent if x > 20.0 => {
            // q = 1/sinh²x = 4e^{−2x}/(1 − e^{−2x})²
            let t = (-2.0 * x).exp();
            let q = 4.0 * t / (1.0 - t).powi(2);
            let den = 8.0 * e * delta * q - 2.0 * v02;
            Coefficients::new(
                8.0 * e * delta * q / den,
                0.0,
                -2.0 * v02 * em2 / (ep2 * den),
                -8.0 * e * m * v02 / (ep2 * den),
            )
        }
        Regime::Evanescent => {
            let sh2 = x.sinh().powi(2);
            let den = 8.0 * e * delta - 2.0 * v02 * sh2;
            Coefficients::new(
                8.0 * e * delta / den,
                0.0,
                -2.0 * v02 * em2 * sh2 / (ep2 * den),
                -8.0 * e * m * v02 * sh2 / (ep2 * den),
            )
        }
    }
}

/// How a coefficient row was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Numeric,
    Closed,
    /// Critical band: second-order series limit.
    Series,
}

/// Numeric solve, or the series limit inside the critical band.
pub fn evaluate(p: &BarrierProblem) -> Result<(Coefficients, Route), ScatteringError> {
    if p.regime() == Regime::Critical {
        return Ok((closed_form(p), Route::Series));
    }
    Ok((solve_barrier(p)?.1, Route::Numeric))
}

/// Single-interface problem at `z = 0` with `V = 0` on the left and `V₀`
/// on the right.
///
/// Channel weights are current ratios `|j_out|/j_in` with the conserved
/// current of [`crate::spinors::current_matrix`]; for the transmitted plane
/// waves this is `(E+m)p₂ / ((E−V₀+m)p₁)`, which reduces to the velocity
/// ratio `p₂/p₁` in the non-relativistic limit. Evanescent transmitted modes
/// carry no current.
pub fn solve_step(
    energy: f64,
    v0: f64,
    constants: &PhysicalConstants,
    incident: Spin,
) -> Result<Coefficients, ScatteringError> {
    positive("E", energy)?;
    if !v0.is_finite() {
        return Err(ScatteringError::NonPositive {
            name: "V0",
            value: v0,
        });
    }
    let m = constants.mass_c2;
    if ((v0 - energy) - m).abs() <= RHO_SINGULAR_RTOL * m {
        return Err(ScatteringError::RhoSingular { gap: v0 - energy });
    }
    if classify(energy, v0) == Regime::Critical {
        return Err(ScatteringError::CriticalBand {
            distance: (energy - v0).abs(),
            width: critical_width(energy, v0),
        });
    }
    let conv = SpinorConvention::default();
    let outer = region_basis(energy, 0.0, m, &conv)?;
    let inner = region_basis(energy, v0, m, &conv)?;
    let cols = [&outer[2], &outer[3], &inner[0], &inner[1]];
    let mut mat = ComplexMatrix::zeros(4, 4);
    let mut eq = [0.0; 4];
    for (j, s) in cols.iter().enumerate() {
        let sign = if j < 2 { 1.0 } else { -1.0 };
        let v = s.matching_components();
        eq[j] = 1.0 / v.norm_inf();
        for r in 0..4 {
            mat[(r, j)] = v[r] * (sign * eq[j]);
        }
    }
    let inc = &outer[incident_index(incident)];
    let rhs = inc.matching_components().scale(c64(-1.0, 0.0));
    let y = solve_linear(&mat, &rhs)?;
    let j_in = inc.current();
    let w = |k: usize| {
        (y[k] * eq[k]).norm_sqr() * probability_current(cols[k].components()).abs() / j_in
    };
    Ok(Coefficients::new(w(2), w(3), w(0), w(1)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Numeric,
    Closed,
    Both,
}

/// Fixed parameters of a sweep over energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepTemplate {
    pub v0: f64,
    pub length: f64,
    pub incident: Spin,
    pub constants: PhysicalConstants,
}

impl SweepTemplate {
    pub fn at(&self, energy: f64) -> Result<BarrierProblem, ScatteringError> {
        BarrierProblem::new(energy, self.v0, self.length, self.incident, self.constants)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub e_over_v0: f64,
    pub coefficients: Coefficients,
    pub route: Route,
    /// `max |numeric − closed|` (method `Both`, outside the critical band).
    pub delta: Option<f64>,
    /// Reason the point could not be evaluated; coefficients are NaN then.
    pub flag: Option<String>,
}

impl SweepRow {
    fn flagged(e_over_v0: f64, err: ScatteringError) -> Self {
        Self {
            e_over_v0,
            coefficients: Coefficients::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            route: Route::Numeric,
            delta: None,
            flag: Some(err.to_string()),
        }
    }
}

fn sweep_point(t: &SweepTemplate, energy: f64, method: Method) -> SweepRow {
    let ratio = energy / t.v0;
    let p = match t.at(energy) {
        Ok(p) => p,
        Err(e) => return SweepRow::flagged(ratio, e),
    };
    let row = |coefficients, route, delta| SweepRow {
        e_over_v0: ratio,
        coefficients,
        route,
        delta,
        flag: None,
    };
    if p.regime() == Regime::Critical {
        return row(closed_form(&p), Route::Series, None);
    }
    match method {
        Method::Closed => row(closed_form(&p), Route::Closed, None),
        Method::Numeric | Method::Both => match solve_barrier(&p) {
            Ok((_, c)) => {
                let delta = (method == Method::Both).then(|| c.max_abs_diff(&closed_form(&p)));
                row(c, Route::Numeric, delta)
            }
            Err(e) => SweepRow::flagged(ratio, e),
        },
    }
}

/// Evaluates every energy (eV) of the grid; rows are returned in grid order.
/// Invalid points become flagged rows and do not stop the sweep.
pub fn sweep(t: &SweepTemplate, energies: &[f64], method: Method) -> Vec<SweepRow> {
    energies
        .par_iter()
        .map(|&e| sweep_point(t, e, method))
        .collect()
}

/// `n` evenly spaced ratios from `lo` to `hi` inclusive.
pub fn ratio_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Phase-independent bounds of the spin-flip and spin-preserving reflection
/// above the barrier (`sin²x = 1`, `cos 2x = −1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub r1: f64,
    pub r2: f64,
}

/// `R₂,env = 8EmV₀² / ((E+m)²(8E² − 8EV₀ + 2V₀²))`, and the same with
/// `2(E−m)²` in place of `8Em` for `R₁`.
pub fn envelope(energy: f64, v0: f64, mass: f64) -> Envelope {
    let den = (energy + mass).powi(2) * (8.0 * energy * energy - 8.0 * energy * v0 + 2.0 * v0 * v0);
    Envelope {
        r1: 2.0 * v0 * v0 * (energy - mass).powi(2) / den,
        r2: 8.0 * energy * mass * v0 * v0 / den,
    }
}

/// `R₂/R₁ = 4Em/(E−m)²`, independent of `L` and `ħc`.
pub fn reflection_ratio(energy: f64, mass: f64) -> f64 {
    4.0 * energy * mass / (energy - mass).powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub e_over_v0: f64,
    pub length: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Closed-form `R₁`, `R₂` on a grid of `(E/V₀, L)` at fixed `V₀`.
pub fn sensitivity_scan(
    v0: f64,
    constants: &PhysicalConstants,
    ratios: &[f64],
    lengths: &[f64],
) -> Result<Vec<ScanRow>, ScatteringError> {
    let mut rows = Vec::with_capacity(ratios.len() * lengths.len());
    for &r in ratios {
        for &l in lengths {
            let p = BarrierProblem::new(r * v0, v0, l, Spin::Up, *constants)?;
            let c = closed_form(&p);
            rows.push(ScanRow {
                e_over_v0: r,
                length: l,
                r1: c.r1,
                r2: c.r2,
            });
        }
    }
    Ok(rows)
}

/// Random barrier problems used by the property suites.
///
/// Propagating: `m ∈ [10³, 10⁷]`, `V₀ ∈ [10⁻², 10⁶]`, `E/V₀ − 1 ∈ [10⁻⁵, 10]`
/// and `L ∈ [10⁻², 10²]` nm, all log-uniform. Evanescent: `E/V₀` uniform in
/// `[10⁻³, 1 − 10⁻⁵]` and `κL` uniform in `[10⁻³, 200]`.
pub fn sample_problem<R: Rng>(rng: &mut R, regime: Regime, hbar_c: f64) -> BarrierProblem {
    let log_uniform = |rng: &mut R, lo: f64, hi: f64| 10f64.powf(rng.gen_range(lo..hi));
    loop {
        let m = log_uniform(rng, 3.0, 7.0);
        let v0 = log_uniform(rng, -2.0, 6.0);
        let constants = PhysicalConstants { hbar_c, mass_c2: m };
        let (e, l) = match regime {
            Regime::Evanescent => {
                let e = v0 * rng.gen_range(1e-3..1.0 - 1e-5);
                let kl = rng.gen_range(1e-3..200.0);
                (e, kl * hbar_c / (2.0 * m * (v0 - e)).sqrt())
            }
            _ => (
                v0 * (1.0 + log_uniform(rng, -5.0, 1.0)),
                log_uniform(rng, -2.0, 2.0),
            ),
        };
        if regime == Regime::Evanescent && ((v0 - e) - m).abs() < 1e-3 * m {
            continue;
        }
        if let Ok(p) = BarrierProblem::new(e, v0, l, Spin::Up, constants) {
            return p;
        }
    }
}
