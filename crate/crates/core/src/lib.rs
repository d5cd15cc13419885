//! Exact computations around `lcm(f(Q) : Q monic of degree n)` for a fixed
//! polynomial `f` over `F_q[T]`.

pub mod cli;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod gf;
pub mod irreducibility;
pub mod kelem;
pub mod lcm_engine;
mod literal;
pub mod local_counts;
pub mod poly;
pub mod report;
pub mod residue;
pub mod roots;
pub mod special;
pub mod symmetry;
pub mod tpoly;
pub mod xpoly;

pub use error::{Error, Result};
pub use gf::{FieldCtx, GfElem};
