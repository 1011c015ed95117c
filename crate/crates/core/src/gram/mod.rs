//! Gram matrices of potential vectors: unknowns, signature conditions and
//! certification.

mod admissible;
mod certify;
mod closed;
mod rank;
mod schur;
mod solve;
mod symbolic;

pub use admissible::{
    fuchsian_admissibility, search_negative, witness_f64, Admissibility, SignSearch, Y_RANGE,
};
pub use certify::{
    certify, solve_and_certify, DottedValue, GramCertificate, MatrixResult, Rejection,
    SevenResolution,
};
pub use closed::{fit_closed_form, ClosedForm, Surd, SurdField};
pub use rank::{rank_conditions, RankSystem};
pub use schur::{Derived, ReductionError, SchurReduction};
pub use solve::{solve_system, Solution, SolveOptions, SolveOutcome};
pub use symbolic::{symbolize, GramError, SymbolicGramMatrix};
