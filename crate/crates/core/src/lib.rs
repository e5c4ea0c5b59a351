//! Exact-arithmetic engine for rational models of fibrations: cohomology of
//! finitely presented CDGAs, fiberwise-product models, zero-divisor
//! cup-lengths and bounds for sequential parametrized topological complexity.

pub mod cdga;
pub mod fibration;
pub mod genfun;
pub mod graded;
pub mod invariants;
pub mod linalg;
pub mod model;
pub mod status;
