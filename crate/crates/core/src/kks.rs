//! KKS symplectic form, invariant complex structure and the Kähler triple on
//! a single orbit.
//!
//! All matrices are expressed in the transported chart frame
//! `(∂x_I, ∂y_I) ↔ (ad_{Ad_g s_I} ρ, ad_{Ad_g a_I} ρ)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::herm::{bracket, bracket_unchecked, max_abs_real, HermitianMatrix, RealMatrix};
use crate::orbit::{LambdaState, OrbitPoint};
use crate::report::CheckReport;
use crate::sample;
use crate::sweep;

/// `Ω(ad_X ρ, ad_Y ρ) = Tr(ρ [X, Y])`.
pub fn kks_eval(point: &OrbitPoint, x: &HermitianMatrix, y: &HermitianMatrix) -> Result<f64> {
    let b = bracket(x, y)?;
    if b.dim() != point.n() {
        return Err(Error::DimensionMismatch {
            left: b.dim(),
            right: point.n(),
        });
    }
    Ok(trace_product(point.rho(), &b))
}

pub(crate) fn trace_product(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    crate::herm::hs_inner_unchecked(a, b)
}

#[derive(Clone, Debug)]
pub struct KksForm {
    pub matrix: RealMatrix,
    pub labels: Vec<String>,
}

fn frame_matrix<F>(frame: &[HermitianMatrix], mut f: F) -> RealMatrix
where
    F: FnMut(&HermitianMatrix, &HermitianMatrix) -> f64,
{
    let k = frame.len();
    RealMatrix::from_fn(k, k, |a, b| f(&frame[a], &frame[b]))
}

pub(crate) fn min_singular_value(m: &RealMatrix) -> f64 {
    if m.is_empty() {
        return f64::INFINITY;
    }
    m.clone().singular_values().min()
}

/// Matrix of the KKS form on the transported normal frame.
pub fn kks_matrix(point: &OrbitPoint) -> Result<KksForm> {
    let frame = point.transported_frame();
    let rho = point.rho();
    let matrix = frame_matrix(&frame, |x, y| trace_product(rho, &bracket_unchecked(x, y)));
    let sigma_min = min_singular_value(&matrix);
    let scale = max_abs_real(&matrix).max(1.0);
    if sigma_min <= 1e-13 * scale {
        return Err(Error::Singular {
            what: "KKS form",
            sigma_min,
        });
    }
    Ok(KksForm {
        matrix,
        labels: point.state().frame_labels(),
    })
}

/// Cyclic sum `Tr(ρ[[X,Y],Z]) + cyclic` on random Hermitian triples at
/// random points of the orbit. Closedness of an invariant 2-form reduces to
/// this Jacobi identity.
pub fn check_closedness(state: &LambdaState, samples: usize, seed: u64, tol: f64) -> CheckReport {
    let n = state.n();
    let residuals = sweep::map_indices(samples, |k| {
        let mut rng = sample::sample_rng(seed, 0xC105ED, k as u64);
        let g = sample::random_unitary(n, &mut rng);
        let rho = state.rho0().conjugate_by(&g);
        let x = sample::random_hermitian(n, &mut rng);
        let y = sample::random_hermitian(n, &mut rng);
        let z = sample::random_hermitian(n, &mut rng);
        jacobi_cyclic(&rho, &x, &y, &z).abs()
    });
    CheckReport::max_residual("kks.closedness_jacobi", &residuals, tol)
}

pub(crate) fn jacobi_cyclic(
    rho: &HermitianMatrix,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    z: &HermitianMatrix,
) -> f64 {
    let term = |a: &HermitianMatrix, b: &HermitianMatrix, c: &HermitianMatrix| {
        trace_product(rho, &bracket_unchecked(&bracket_unchecked(a, b), c))
    };
    term(x, y, z) + term(y, z, x) + term(z, x, y)
}

/// Per-root 2×2 rotation blocks `J∂x_I = σ_I ∂y_I`, `J∂y_I = −σ_I ∂x_I`.
#[derive(Clone, Debug)]
pub struct InvariantComplexStructure {
    pub matrix: RealMatrix,
    /// Orientation `σ_I ∈ {±1}` per active root.
    pub orientation: Vec<f64>,
}

/// The orientation of each plane is the sign of `Ω(∂x_I, ∂y_I)` at the
/// reference point, which makes `G = Ω J` positive definite.
pub fn invariant_complex_structure(state: &LambdaState) -> InvariantComplexStructure {
    let n = state.n();
    let rho0 = state.rho0();
    let roots = state.active_roots();
    let k = 2 * roots.len();
    let mut matrix = RealMatrix::zeros(k, k);
    let mut orientation = Vec::with_capacity(roots.len());
    for (p, r) in roots.iter().enumerate() {
        let omega_xy = trace_product(
            &rho0,
            &bracket_unchecked(&r.s().matrix(n), &r.a().matrix(n)),
        );
        let sigma = if omega_xy >= 0.0 { 1.0 } else { -1.0 };
        matrix[(2 * p + 1, 2 * p)] = sigma;
        matrix[(2 * p, 2 * p + 1)] = -sigma;
        orientation.push(sigma);
    }
    InvariantComplexStructure {
        matrix,
        orientation,
    }
}

#[derive(Clone, Debug)]
pub struct KahlerTriple {
    pub g: RealMatrix,
    pub omega: KksForm,
    pub j: InvariantComplexStructure,
}

/// Residuals of the Kähler compatibility identities.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahlerResiduals {
    pub g_symmetric: f64,
    pub g_min_eigenvalue: f64,
    pub j_preserves_omega: f64,
    pub j_isometry: f64,
    pub j_squared: f64,
}

impl KahlerTriple {
    pub fn residuals(&self) -> KahlerResiduals {
        let j = &self.j.matrix;
        let o = &self.omega.matrix;
        let g = &self.g;
        let k = g.nrows();
        KahlerResiduals {
            g_symmetric: max_abs_real(&(g - g.transpose())),
            g_min_eigenvalue: min_sym_eigenvalue(g),
            j_preserves_omega: max_abs_real(&(j.transpose() * o * j - o)),
            j_isometry: max_abs_real(&(j.transpose() * g * j - g)),
            j_squared: max_abs_real(&(j * j + RealMatrix::identity(k, k))),
        }
    }
}

pub(crate) fn min_sym_eigenvalue(m: &RealMatrix) -> f64 {
    if m.is_empty() {
        return f64::INFINITY;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

/// `G = Ω J`, required symmetric positive definite.
pub fn kahler_triple(point: &OrbitPoint) -> Result<KahlerTriple> {
    let omega = kks_matrix(point)?;
    let j = invariant_complex_structure(point.state());
    let g = &omega.matrix * &j.matrix;
    let min_eigenvalue = min_sym_eigenvalue(&g);
    if min_eigenvalue <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue });
    }
    Ok(KahlerTriple { g, omega, j })
}

/// Fubini–Study metric of `CP^(n−1)` at affine coordinate `ξ`, from the
/// potential `log(1 + |ξ|²)`: `h_kl̄ = δ_kl/(1+|ξ|²) − ξ̄_k ξ_l/(1+|ξ|²)²`,
/// `g(w, w') = Re Σ h_kl̄ w_k w̄'_l`. Real coordinates are ordered
/// `(Re ξ_1, Im ξ_1, Re ξ_2, …)`.
pub fn fubini_study_reference(state: &LambdaState, xi: &[Complex64]) -> Result<RealMatrix> {
    if !state.is_pure() {
        return Err(Error::NotPure);
    }
    let m = state.n() - 1;
    if xi.len() != m {
        return Err(Error::DimensionMismatch {
            left: xi.len(),
            right: m,
        });
    }
    Ok(fubini_study_metric(xi))
}

pub(crate) fn fubini_study_metric(xi: &[Complex64]) -> RealMatrix {
    let m = xi.len();
    let r2: f64 = 1.0 + xi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let h = |k: usize, l: usize| {
        let delta = if k == l { 1.0 } else { 0.0 };
        Complex64::new(delta / r2, 0.0) - xi[k].conj() * xi[l] / (r2 * r2)
    };
    // real basis vector p ↔ complex vector with entry (1 or i) at p/2
    let unit = |p: usize| {
        if p.is_multiple_of(2) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        }
    };
    RealMatrix::from_fn(2 * m, 2 * m, |p, q| {
        let (k, l) = (p / 2, q / 2);
        (h(k, l) * unit(p) * unit(q).conj()).re
    })
}

/// Jacobian of the exp-chart `(x_I, y_I) ↦ ξ` at the chart origin of the pure
/// state: `dψ = i X e_1` and `dξ_k = dψ_k` there.
pub fn exp_chart_affine_jacobian(state: &LambdaState) -> Result<RealMatrix> {
    if !state.is_pure() {
        return Err(Error::NotPure);
    }
    let n = state.n();
    let frame = state.normal_frame();
    let m = n - 1;
    let mut jac = RealMatrix::zeros(2 * m, frame.len());
    for (col, b) in frame.iter().enumerate() {
        let x = b.matrix(n);
        for k in 1..n {
            let d = Complex64::new(0.0, 1.0) * x.entry(k, 0);
            jac[(2 * (k - 1), col)] = d.re;
            jac[(2 * (k - 1) + 1, col)] = d.im;
        }
    }
    Ok(jac)
}

/// Fubini–Study metric pulled back to the exp-chart frame at the origin.
pub fn fubini_study_in_chart_frame(state: &LambdaState) -> Result<RealMatrix> {
    let jac = exp_chart_affine_jacobian(state)?;
    let fs = fubini_study_reference(state, &vec![Complex64::default(); state.n() - 1])?;
    Ok(jac.transpose() * fs * jac)
}

/// Multiplication by `i` on the affine coordinates, pulled back to the
/// exp-chart frame at the origin.
pub fn standard_complex_structure_in_chart_frame(state: &LambdaState) -> Result<RealMatrix> {
    let jac = exp_chart_affine_jacobian(state)?;
    let m = jac.nrows();
    let mut j_std = RealMatrix::zeros(m, m);
    for p in 0..m / 2 {
        j_std[(2 * p + 1, 2 * p)] = 1.0;
        j_std[(2 * p, 2 * p + 1)] = -1.0;
    }
    let inv = jac.clone().try_inverse().ok_or(Error::Singular {
        what: "chart Jacobian",
        sigma_min: 0.0,
    })?;
    Ok(inv * j_std * jac)
}

/// Least-squares constant `c` with `a ≈ c b`, and the max entry residual.
pub fn fit_proportionality(a: &RealMatrix, b: &RealMatrix) -> (f64, f64) {
    let c = a.dot(b) / b.dot(b);
    (c, max_abs_real(&(a - b * c)))
}
