//! Symmetric logarithmic differential, Fisher information tensor and the
//! Fisher structure of a Λ-mixed state orbit.
//!
//! Conventions, all in the transported chart frame:
//!
//! * `h(v, w) = Tr(ρ L_v L_w)` with `L_v` the SLD of `v`; `h` is Hermitian.
//! * Fisher metric `G = Re h`, Fisher form `W = −Im h`, so `h = G − iW` and the
//!   real tensor is `F = G + W`.
//! * With these conventions `W(v, w) = ½ Tr(ρ [L_v, L_w])`, i.e. `W` is the
//!   pullback of the KKS pairing through `𝔻𝕃` scaled by
//!   [`FISHER_FORM_KKS_SCALE`].
//! * The Fisher structure is `𝔍 = W⁻¹ G`, the contraction of the metric part
//!   of `F` with the Poisson bivector `W⁻¹`; it satisfies `G = W 𝔍`.
//!
//! On the root plane of `I = (i,j)` with `α = λ_i − λ_j`, `β = λ_i + λ_j`:
//! `G = (2α/β)² β · I₂`, `W = (2α/β)² α · [[0, 1], [−1, 0]]`, and
//! `𝔍 = (β/α) · [[0, −1], [1, 0]]`, hence `𝔍² = −(β/α)²`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::herm::{bracket, bracket_unchecked, ComplexMatrix, HermitianMatrix, RealMatrix};
use crate::kks::{min_singular_value, trace_product};
use crate::orbit::{phi_map, LambdaState, OrbitPoint};
use crate::report::{CheckReport, CompatibilityReport};

/// Ratio between the Fisher form and the `𝔻𝕃`-pullback of `Tr(ρ[X,Y])`.
pub const FISHER_FORM_KKS_SCALE: f64 = 0.5;

/// `𝔇(X) = [X, ρ]`.
pub fn d_map(point: &OrbitPoint, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    bracket(x, point.rho())
}

/// The unique `X` in the transported normal space with `½{X, ρ} = A`.
///
/// In the eigenframe of `ρ` this is `X_kl = 2 A_kl / (λ_k + λ_l)`. `A` must lie
/// in the transported normal space within `tol · max(1, ‖A‖)`.
pub fn l_map(point: &OrbitPoint, a: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    let n = point.n();
    if a.dim() != n {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: n,
        });
    }
    let state = point.state();
    let lambda = state.lambda();
    let a0 = point.pull_back(a);
    let mut residual = 0.0_f64;
    let mut x0 = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let z = a0.entry(k, l);
            if state.same_block(k, l) {
                residual = residual.max(z.norm());
                continue;
            }
            let beta = lambda[k] + lambda[l];
            if beta <= tol {
                return Err(Error::UndefinedSld {
                    i: k.min(l) + 1,
                    j: k.max(l) + 1,
                    beta,
                });
            }
            x0[(k, l)] = z * (2.0 / beta);
        }
    }
    if residual > tol * a.max_abs().max(1.0) {
        return Err(Error::NotTangent { residual });
    }
    Ok(point.push_forward(&HermitianMatrix::symmetrize(x0)))
}

/// Symmetric logarithmic differential of the tangent vector `v` at `point`:
/// the solution of `v = ½{L, ρ}` in the transported normal space.
pub fn sld(point: &OrbitPoint, v: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    l_map(point, v, tol)
}

/// Tangent matrix `Σ c_a ad_{f_a} ρ` for components `c` on the chart frame.
pub fn chart_tangent(point: &OrbitPoint, components: &[f64]) -> Result<HermitianMatrix> {
    let frame = point.tangent_frame();
    if frame.len() != components.len() {
        return Err(Error::ChartSizeMismatch {
            expected: frame.len() / 2,
            got: components.len() / 2,
        });
    }
    Ok(frame
        .iter()
        .zip(components)
        .fold(HermitianMatrix::zeros(point.n()), |acc, (t, &c)| {
            acc + t.scaled(c)
        }))
}

#[derive(Clone, Debug, Serialize)]
pub struct FisherTensor {
    pub basis: Vec<String>,
    /// `G + W`
    #[serde(rename = "F", serialize_with = "crate::json::ser_real_matrix")]
    pub f: RealMatrix,
    #[serde(rename = "G", serialize_with = "crate::json::ser_real_matrix")]
    pub g: RealMatrix,
    #[serde(rename = "W", serialize_with = "crate::json::ser_real_matrix")]
    pub w: RealMatrix,
}

impl FisherTensor {
    fn from_parts(basis: Vec<String>, g: RealMatrix, w: RealMatrix) -> Self {
        Self {
            basis,
            f: &g + &w,
            g,
            w,
        }
    }

    /// `h = G − iW`.
    pub fn hermitian(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.g.nrows(), self.g.ncols(), |a, b| {
            Complex64::new(self.g[(a, b)], -self.w[(a, b)])
        })
    }
}

fn trace_triple(m: &ComplexMatrix, l: &HermitianMatrix) -> Complex64 {
    // Tr(M L) for M = ρ L_a
    let n = m.nrows();
    let mut acc = Complex64::default();
    for i in 0..n {
        for j in 0..n {
            acc += m[(i, j)] * l.entry(j, i);
        }
    }
    acc
}

/// Fisher tensor at `point`, assembled from SLDs of the transported frame.
pub fn fisher_tensor(point: &OrbitPoint) -> Result<FisherTensor> {
    let tol = 1e-9;
    let slds: Vec<HermitianMatrix> = point
        .tangent_frame()
        .iter()
        .map(|t| sld(point, t, tol))
        .collect::<Result<_>>()?;
    let k = slds.len();
    let rho_l: Vec<ComplexMatrix> = slds
        .iter()
        .map(|l| point.rho().matrix() * l.matrix())
        .collect();
    let h = ComplexMatrix::from_fn(k, k, |a, b| trace_triple(&rho_l[a], &slds[b]));
    let g = RealMatrix::from_fn(k, k, |a, b| 0.5 * (h[(a, b)].re + h[(b, a)].re));
    let w = RealMatrix::from_fn(k, k, |a, b| -0.5 * (h[(a, b)].im - h[(b, a)].im));
    Ok(FisherTensor::from_parts(point.state().frame_labels(), g, w))
}

/// Closed-form Fisher tensor: per active root plane,
/// `(2α/β)² (β dx⊙dx + β dy⊙dy)` for `G` and `(2α/β)² α dx∧dy` for `W`.
pub fn fisher_tensor_chart(state: &LambdaState) -> FisherTensor {
    let roots = state.active_roots();
    let k = 2 * roots.len();
    let mut g = RealMatrix::zeros(k, k);
    let mut w = RealMatrix::zeros(k, k);
    for (p, r) in roots.iter().enumerate() {
        let pref = (2.0 * r.alpha / r.beta).powi(2);
        g[(2 * p, 2 * p)] = pref * r.beta;
        g[(2 * p + 1, 2 * p + 1)] = pref * r.beta;
        w[(2 * p, 2 * p + 1)] = pref * r.alpha;
        w[(2 * p + 1, 2 * p)] = -pref * r.alpha;
    }
    FisherTensor::from_parts(state.frame_labels(), g, w)
}

/// Compares the Fisher form against `½ Tr(ρ [𝔻𝕃Φ(v), 𝔻𝕃Φ(w)])` on the chart
/// frame, and checks antisymmetry and nondegeneracy of `W`.
pub fn fisher_form_pullback_check(point: &OrbitPoint, tol: f64) -> Result<CompatibilityReport> {
    let ft = fisher_tensor(point)?;
    let tangents = point.tangent_frame();
    let lifted: Vec<HermitianMatrix> = tangents
        .iter()
        .map(|t| {
            let x = phi_map(point, t, 1e-9)?;
            let dx = d_map(point, &x)?;
            l_map(point, &dx, 1e-9)
        })
        .collect::<Result<_>>()?;
    let k = lifted.len();
    let mut pullback_residual = 0.0_f64;
    for a in 0..k {
        for b in 0..k {
            let omega = trace_product(point.rho(), &bracket_unchecked(&lifted[a], &lifted[b]));
            pullback_residual =
                pullback_residual.max((ft.w[(a, b)] - FISHER_FORM_KKS_SCALE * omega).abs());
        }
    }
    let antisym = crate::herm::max_abs_real(&(&ft.w + ft.w.transpose()));
    let mut report = CompatibilityReport::default();
    report.push(CheckReport::max_residual(
        "fisher.form_pullback",
        &[pullback_residual],
        tol,
    ));
    report.push(CheckReport::max_residual(
        "fisher.form_antisymmetry",
        &[antisym],
        tol,
    ));
    let conditioning = if k == 0 {
        1.0
    } else {
        let svs = ft.w.clone().singular_values();
        svs.min() / svs.max()
    };
    report.push(CheckReport::lower_bound(
        "fisher.form_nondegenerate",
        &[conditioning],
        1e-13,
    ));
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct FisherStructureTensor {
    pub basis: Vec<String>,
    #[serde(rename = "J", serialize_with = "crate::json::ser_real_matrix")]
    pub j: RealMatrix,
    /// `Δ_I` read off `−𝔍²` on each root plane.
    pub delta: Vec<f64>,
    /// `max |𝔍² + diag((β_I/α_I)² I₂)|`.
    pub square_residual: f64,
}

impl FisherStructureTensor {
    /// `diag(Δ_I ⊗ I₂)`.
    pub fn delta_matrix(&self) -> RealMatrix {
        let d: Vec<f64> = self.delta.iter().flat_map(|&x| [x, x]).collect();
        RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
    }
}

/// `(β_I/α_I)²` per active root.
pub fn delta_closed_form(state: &LambdaState) -> Vec<f64> {
    state
        .active_roots()
        .iter()
        .map(|r| (r.beta / r.alpha).powi(2))
        .collect()
}

/// `𝔍 = W⁻¹ G` at `point`.
pub fn fisher_structure(point: &OrbitPoint) -> Result<FisherStructureTensor> {
    let ft = fisher_tensor(point)?;
    fisher_structure_from_tensor(point.state(), &ft)
}

pub fn fisher_structure_from_tensor(
    state: &LambdaState,
    ft: &FisherTensor,
) -> Result<FisherStructureTensor> {
    let k = ft.w.nrows();
    let sigma_min = min_singular_value(&ft.w);
    if k > 0 && sigma_min <= 1e-14 * crate::herm::max_abs_real(&ft.w).max(f64::MIN_POSITIVE) {
        return Err(Error::Singular {
            what: "Fisher form",
            sigma_min,
        });
    }
    let poisson = ft.w.clone().try_inverse().ok_or(Error::Singular {
        what: "Fisher form",
        sigma_min,
    })?;
    let j = poisson * &ft.g;
    let sq = &j * &j;
    let delta: Vec<f64> = (0..k / 2)
        .map(|p| -0.5 * (sq[(2 * p, 2 * p)] + sq[(2 * p + 1, 2 * p + 1)]))
        .collect();
    let expected: Vec<f64> = delta_closed_form(state)
        .iter()
        .flat_map(|&x| [x, x])
        .collect();
    let target = -RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(expected));
    let square_residual = crate::herm::max_abs_real(&(sq - target));
    Ok(FisherStructureTensor {
        basis: ft.basis.clone(),
        j,
        delta,
        square_residual,
    })
}

/// Both sides of an identity expressing `β_ij` through the roots and
/// the trace: `β_direct = λ_i + λ_j` and
/// `β_formula = (1/n)(Σ_{(k,m)≠(i,j)} α_km + 2(n − ⌊(n+2)/2⌋) Tr ρ₀)`, the
/// sum running over ordered pairs. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootIdentityProbe {
    pub i: usize,
    pub j: usize,
    pub beta_direct: f64,
    pub beta_formula: f64,
    pub discrepancy: f64,
}

pub fn eval_root_identity(state: &LambdaState, i: usize, j: usize) -> Result<RootIdentityProbe> {
    let n = state.n();
    if i >= n || j >= n || i == j {
        return Err(Error::Malformed(format!(
            "root index ({i},{j}) out of range for n = {n}"
        )));
    }
    let l = state.lambda();
    let mut sum = 0.0;
    for k in 0..n {
        for m in 0..n {
            if k != m && (k, m) != (i, j) {
                sum += l[k] - l[m];
            }
        }
    }
    let trace: f64 = l.iter().sum();
    let floor = (n + 2) / 2;
    let beta_formula = (sum + 2.0 * (n as f64 - floor as f64) * trace) / n as f64;
    let beta_direct = l[i] + l[j];
    Ok(RootIdentityProbe {
        i,
        j,
        beta_direct,
        beta_formula,
        discrepancy: beta_formula - beta_direct,
    })
}

/// `max |{v_ij, ρ₀} − β_ij v_ij|` over all complex root vectors `v_ij = e_ij`.
pub fn anticommutator_root_residual(state: &LambdaState) -> f64 {
    let n = state.n();
    let rho = state.rho0();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut v = ComplexMatrix::zeros(n, n);
            v[(i, j)] = Complex64::new(1.0, 0.0);
            let anti = &v * rho.matrix() + rho.matrix() * &v;
            let beta = state.lambda()[i] + state.lambda()[j];
            worst = worst.max(crate::herm::max_abs(
                &(anti - v * Complex64::new(beta, 0.0)),
            ));
        }
    }
    worst
}
