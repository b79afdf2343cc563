//! Exact finite-field machinery for an explicit quadric fibration over `P^2`
//! and its resolution: configurations, fibre censuses, blow-up count ledgers,
//! trace fits and mod-2 residues.

pub mod gf;
pub mod proj;
pub mod config;
pub mod quadform;
pub mod fibration;
pub mod resolution;
pub mod lefschetz;
pub mod symbols;
