//! Exact arithmetic kernel: integer matrices, Smith normal form,
//! number theory, and cyclotomic rings.  Everything here is pure and
//! overflow-free; no floating point is used anywhere in the crate.

pub mod cyclotomic;
pub mod matrix;
pub mod numtheory;
pub mod ratmat;
pub mod snf;

pub use cyclotomic::CyclotomicElement;
pub use matrix::IntegerMatrix;
pub use snf::{smith_normal_form, SmithForm};
