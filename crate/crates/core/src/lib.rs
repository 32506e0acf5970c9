//! Spectral toolkit for the Fujiwara Laplacian of a length-weighted graph.
//!
//! Given a simple connected graph and positive edge lengths `l`, the vertex
//! weights `m0(u) = Σ_{v~u} l(uv)` and edge weights `m1 = 1/l` define a
//! Laplacian whose first nonzero eigenvalue `λ1(G, l)` is the object of
//! study. The scale-invariant quantity `λ1 · (Σ m0)²` is maximized over all
//! length functions; on graphs containing a cycle its supremum is infinite.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | graphs, girth cycles, distances |
//! | [`weights`] | length functions and Fujiwara weights |
//! | [`linalg`] | packed symmetric matrices, Jacobi eigensolver |
//! | [`spectral`] | Laplacian assembly, `λ1`, Rayleigh quotients |
//! | [`cycle`] | the degenerating cycle family and its symmetry split |
//! | [`fit`] | log-log slope fits |
//! | [`surgery`] | pendant attachment/contraction, vertex cuts |
//! | [`reduce`] | cut-and-contract reduction of a graph to a cycle |
//! | [`optimize`] | eigenvalue gradient and ascent on log-lengths |
//! | [`random`] | seeded random instances |

pub mod cycle;
pub mod error;
pub mod fit;
pub mod graph;
pub mod linalg;
pub mod optimize;
pub mod random;
pub mod reduce;
pub mod spectral;
pub mod surgery;
pub mod weights;

pub use cycle::{cycle_lt, involution, sweep_asymptotics, symmetry_split, SweepConfig, SweepReport, SymmetrySplit};
pub use error::{Error, Result};
pub use graph::{Edge, Graph};
pub use linalg::{symmetric_eigen, SpectralResult, SymMatrix};
pub use optimize::{lambda1_gradient, maximize_lambda1, OptimizationReport, OptimizeConfig, Verdict};
pub use reduce::{reduce_to_cycle, ReductionTrace, SurgeryStep};
pub use spectral::{apply_laplacian, assemble_laplacian, lambda1, lambda1_normalized, rayleigh_quotient};
pub use surgery::{attach_pendant, contract_pendant, cut_at_vertex, eigen_convergence_check};
pub use weights::{fujiwara_weights, normalize_lengths, FujiwaraWeights, LengthFunction};
