//! Exact integer polynomials, dyadic interval arithmetic and real root isolation.

mod dyadic;
mod poly;
mod resultant;
mod roots;

use thiserror::Error;

pub use dyadic::{interval_eval, Dyadic, DyadicInterval};
pub use poly::{poly_arith, IntPoly, PolyOp};
pub use resultant::{bareiss_det, discriminant, resultant, sylvester_matrix};
pub use roots::{
    isolate_real_roots, refine_root, root_bound, sturm_count, RootIsolation, SturmChain,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("modulus is not monic")]
    NonMonicModulus,
    #[error("interval endpoint is a root")]
    EndpointIsRoot,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("root index {idx} out of range ({len} roots)")]
    IndexOutOfRange { idx: usize, len: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("degree too small")]
    DegreeTooSmall,
}
