//! Exact counts and asymptotics for lozenge tilings of hexagons with
//! collinear triangular holes on the horizontal axis.

pub mod arith;
pub mod asymptotics;
pub mod cli;
pub mod matrices;
pub mod oracle;
pub mod regions;
pub mod zeta;
