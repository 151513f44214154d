//! Spin-resolved one-dimensional scattering and bound states for the
//! first-order non-relativistic spinor equation
//! `(E − V)η ψ + iγ·∇ψ + mη†ψ = 0`, with η = (γ⁰ + iγ⁵)/√2.

pub mod boundstates;
pub mod checks;
pub mod clifford;
pub mod numerics;
pub mod pauligauge;
pub mod scattering;
pub mod spinors;
pub mod waveop;
