//! Geometry of `U(n)` coadjoint orbits viewed as spaces of mixed quantum
//! states with a fixed spectrum `Λ`.
//!
//! The crate builds, at the diagonal reference point `ρ₀ = diag(Λ)` and at
//! transported points `g ρ₀ g†`:
//!
//! * the root-space splitting `𝔲(n) = 𝔥 ⊕ 𝔫` and the exponential chart ([`orbit`]),
//! * the KKS symplectic form, the invariant complex structure and the
//!   resulting Kähler triple ([`kks`]),
//! * the symmetric logarithmic differential, the Fisher tensor `F = G + W`
//!   and the Fisher structure `𝔍 = W⁻¹G` ([`fisher`]),
//! * linear Fisher structures and their normal forms ([`linfisher`]),
//! * orbit fibrations `𝒪(η₀) → 𝒪(ρ₀)` ([`fibration`]),
//! * randomized verification suites over all of the above ([`verify`]).
//!
//! Conventions: the Lie bracket on Hermitian matrices is `[A, B] = i(AB − BA)`
//! and the pairing is `Tr(AB)`.

pub mod error;
pub mod fibration;
pub mod fisher;
pub mod herm;
pub mod json;
pub mod kks;
pub mod linfisher;
pub mod orbit;
pub mod report;
pub mod sample;
pub mod sweep;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use fibration::{fibration_new, OrbitFibration};
pub use fisher::{
    fisher_structure, fisher_tensor, fisher_tensor_chart, FisherStructureTensor, FisherTensor,
};
pub use herm::{bracket, hs_inner, ComplexMatrix, HermitianMatrix, RealMatrix};
pub use kks::{kahler_triple, kks_matrix, KahlerTriple};
pub use linfisher::{is_fisher_structure, normal_form, FisherForm};
pub use orbit::{exp_chart, ChartVector, LambdaState, OrbitPoint};
pub use report::{CheckReport, CompatibilityReport};
pub use tol::Tolerances;
pub use verify::{Scope, VerifyConfig, VerifyReport};
