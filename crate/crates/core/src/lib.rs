//! Triorthogonal matrices from one-point algebraic-geometry codes over GF(2^s),
//! the associated quantum CSS codes, their decoder, and magic-state distillation analysis.

pub mod gf2e;
pub mod linalg;
pub mod selfdual;
pub mod curves;
pub mod agcode;
pub mod triortho;
pub mod csscode;
pub mod decoder;
pub mod phasepoly;
pub mod statecheck;
pub mod distill;
