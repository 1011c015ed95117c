//! Enumeration of compact hyperbolic Coxeter polytopes of a prescribed
//! combinatorial type.

pub mod algebra;
pub mod diagram;
pub mod combinatorics;
pub mod gram;
pub mod gluing;
pub mod pasting;
