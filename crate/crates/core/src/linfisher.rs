//! Linear Fisher structures: skew-adjoint automorphisms whose square is
//! `−diag(d_i² I₂)` for positive roots `d_i`.
//!
//! Two representations are supported. The real form is a `2n×2n` matrix; it is
//! a Fisher structure iff it is skew-symmetric and invertible. The complex
//! form is an `n×n` matrix; it is a Fisher structure iff it is skew-adjoint and
//! its rows are pairwise orthogonal and nonzero, i.e. `M M* = D` is positive
//! diagonal and `M² = −D`.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::herm::{max_abs, max_abs_real, ComplexMatrix, RealMatrix};
use crate::tol::{close_relative, Tolerances};

#[derive(Clone, Debug, PartialEq)]
pub enum FisherForm {
    Real(RealMatrix),
    Complex(ComplexMatrix),
}

impl FisherForm {
    pub fn kind(&self) -> &'static str {
        match self {
            FisherForm::Real(_) => "real",
            FisherForm::Complex(_) => "complex",
        }
    }

    pub fn nrows(&self) -> usize {
        match self {
            FisherForm::Real(m) => m.nrows(),
            FisherForm::Complex(m) => m.nrows(),
        }
    }

    /// Real `2n×2n` matrix of a complex `n×n` one on `(Re z, Im z)`.
    pub fn realify(&self) -> RealMatrix {
        match self {
            FisherForm::Real(m) => m.clone(),
            FisherForm::Complex(m) => {
                let n = m.nrows();
                RealMatrix::from_fn(2 * n, 2 * n, |r, c| {
                    let z = m[(r % n, c % n)];
                    match (r < n, c < n) {
                        (true, true) | (false, false) => z.re,
                        (true, false) => -z.im,
                        (false, true) => z.im,
                    }
                })
            }
        }
    }
}

/// Standard complex structure: `[[0, −1], [1, 0]]` on each plane of `R^{2n}`.
pub fn standard_real(planes: usize) -> RealMatrix {
    block_diagonal(&vec![1.0; planes])
}

/// Real form with root `d_k` on plane `k`.
pub fn block_diagonal(roots: &[f64]) -> RealMatrix {
    let k = roots.len();
    let mut m = RealMatrix::zeros(2 * k, 2 * k);
    for (p, &d) in roots.iter().enumerate() {
        m[(2 * p + 1, 2 * p)] = d;
        m[(2 * p, 2 * p + 1)] = -d;
    }
    m
}

/// `i·diag(d)`: the complex form with roots `d`.
pub fn diagonal_complex(roots: &[f64]) -> ComplexMatrix {
    let n = roots.len();
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(0.0, roots[r])
        } else {
            Complex64::default()
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipDiagnostics {
    pub is_fisher: bool,
    pub form: &'static str,
    pub skew_residual: f64,
    /// Largest off-diagonal entry of `M M*` (complex form only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonality_residual: Option<f64>,
    /// Smallest eigenvalue of `−M²`.
    pub min_square_eigenvalue: f64,
    /// Roots: per row for the complex form, descending for the real form.
    pub roots: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

pub fn is_fisher_structure(m: &FisherForm, tol: f64) -> MembershipDiagnostics {
    match m {
        FisherForm::Real(j) => real_membership(j, tol),
        FisherForm::Complex(j) => complex_membership(j, tol),
    }
}

fn real_membership(j: &RealMatrix, tol: f64) -> MembershipDiagnostics {
    let mut diag = MembershipDiagnostics {
        is_fisher: false,
        form: "real",
        skew_residual: 0.0,
        orthogonality_residual: None,
        min_square_eigenvalue: 0.0,
        roots: Vec::new(),
        failure: None,
    };
    if j.nrows() != j.ncols() || j.nrows() == 0 {
        diag.failure = Some("not a non-empty square matrix".into());
        return diag;
    }
    let scale = max_abs_real(j).max(1.0);
    diag.skew_residual = max_abs_real(&(j + j.transpose()));
    let s = -(j * j);
    let s = (&s + s.transpose()) * 0.5;
    let mut eig: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    diag.min_square_eigenvalue = *eig.last().unwrap_or(&0.0);
    diag.roots = eig
        .chunks(2)
        .map(|p| (p.iter().sum::<f64>() / p.len() as f64).max(0.0).sqrt())
        .collect();

    if diag.skew_residual > tol * scale {
        diag.failure = Some("not skew-adjoint".into());
    } else if j.nrows() % 2 == 1 {
        diag.failure = Some("odd dimension: a skew-symmetric matrix is singular".into());
    } else if diag.min_square_eigenvalue <= tol * scale * scale {
        diag.failure = Some("singular: square has a non-negative eigenvalue".into());
    } else {
        diag.is_fisher = true;
    }
    diag
}

fn complex_membership(m: &ComplexMatrix, tol: f64) -> MembershipDiagnostics {
    let mut diag = MembershipDiagnostics {
        is_fisher: false,
        form: "complex",
        skew_residual: 0.0,
        orthogonality_residual: Some(0.0),
        min_square_eigenvalue: 0.0,
        roots: Vec::new(),
        failure: None,
    };
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        diag.failure = Some("not a non-empty square matrix".into());
        return diag;
    }
    let n = m.nrows();
    let scale = max_abs(m).max(1.0);
    diag.skew_residual = max_abs(&(m + m.adjoint()));
    // −M² = M M* for skew-adjoint M
    let d = -(m * m);
    let mut off = 0.0_f64;
    let mut square_imag = 0.0_f64;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                off = off.max(d[(r, c)].norm());
            } else {
                square_imag = square_imag.max(d[(r, r)].im.abs());
            }
        }
    }
    diag.orthogonality_residual = Some(off);
    let diag_entries: Vec<f64> = (0..n).map(|k| d[(k, k)].re).collect();
    diag.min_square_eigenvalue = diag_entries.iter().copied().fold(f64::INFINITY, f64::min);
    diag.roots = diag_entries.iter().map(|&x| x.max(0.0).sqrt()).collect();

    if diag.skew_residual > tol * scale {
        diag.failure = Some("not skew-adjoint".into());
    } else if off > tol * scale * scale || square_imag > tol * scale * scale {
        diag.failure = Some("rows are not pairwise orthogonal".into());
    } else if diag.min_square_eigenvalue <= tol * scale * scale {
        diag.failure = Some("a row vanishes: structure is singular".into());
    } else {
        diag.is_fisher = true;
    }
    diag
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalFormResult {
    /// `(d_r, m_r)`, descending in `d_r`; `m_r` counts planes.
    pub roots: Vec<(f64, usize)>,
    #[serde(serialize_with = "crate::json::ser_real_matrix")]
    pub change_of_basis: RealMatrix,
    #[serde(serialize_with = "crate::json::ser_real_matrix")]
    pub block_matrix: RealMatrix,
    /// `max |Q · block · Qᵀ − J|`.
    pub residual: f64,
}

/// Orthogonal `Q` with `Qᵀ J Q = ⊕_r [[0, −d_r I], [d_r I, 0]]`.
///
/// Eigenspaces of `−J²` are `J`-invariant; inside each one an orthonormal
/// basis `e_1, Je_1/d, e_2, Je_2/d, …` is built by Gram–Schmidt and reordered
/// as `(e_1 … e_m, f_1 … f_m)`.
pub fn normal_form(m: &FisherForm, tol: &Tolerances) -> Result<NormalFormResult> {
    let diag = is_fisher_structure(m, tol.verification);
    if !diag.is_fisher {
        return Err(Error::NotFisherStructure(diag.failure.unwrap_or_default()));
    }
    let j = m.realify();
    let dim = j.nrows();
    let s = -(&j * &j);
    let eig = SymmetricEigen::new((&s + s.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut q = RealMatrix::zeros(dim, dim);
    let mut block = RealMatrix::zeros(dim, dim);
    let mut roots = Vec::new();
    let mut col = 0;
    let mut start = 0;
    while start < dim {
        let d_start = eig.eigenvalues[order[start]].sqrt();
        let mut end = start + 1;
        while end < dim
            && close_relative(
                d_start,
                eig.eigenvalues[order[end]].max(0.0).sqrt(),
                tol.root_cluster,
            )
        {
            end += 1;
        }
        let size = end - start;
        if size % 2 != 0 {
            return Err(Error::NotFisherStructure(
                "root cluster of odd dimension; raise the clustering tolerance".into(),
            ));
        }
        let m_r = size / 2;
        let d: f64 = order[start..end]
            .iter()
            .map(|&k| eig.eigenvalues[k].sqrt())
            .sum::<f64>()
            / size as f64;
        let space: Vec<nalgebra::DVector<f64>> = order[start..end]
            .iter()
            .map(|&k| eig.eigenvectors.column(k).into_owned())
            .collect();
        let mut es: Vec<nalgebra::DVector<f64>> = Vec::new();
        let mut fs: Vec<nalgebra::DVector<f64>> = Vec::new();
        for v in &space {
            if es.len() == m_r {
                break;
            }
            let mut w = v.clone();
            for u in es.iter().chain(fs.iter()) {
                let overlap = u.dot(&w);
                w -= u * overlap;
            }
            let norm = w.norm();
            if norm < 1e-6 {
                continue;
            }
            w /= norm;
            let mut f = &j * &w / d;
            for u in es.iter().chain(fs.iter()) {
                let overlap = u.dot(&f);
                f -= u * overlap;
            }
            f /= f.norm();
            es.push(w);
            fs.push(f);
        }
        if es.len() != m_r {
            return Err(Error::NotFisherStructure(
                "could not build an adapted basis".into(),
            ));
        }
        for (k, e) in es.iter().enumerate() {
            q.set_column(col + k, e);
        }
        for (k, f) in fs.iter().enumerate() {
            q.set_column(col + m_r + k, f);
        }
        for k in 0..m_r {
            block[(col + m_r + k, col + k)] = d;
            block[(col + k, col + m_r + k)] = -d;
        }
        roots.push((d, m_r));
        col += size;
        start = end;
    }
    let residual = max_abs_real(&(&q * &block * q.transpose() - &j));
    Ok(NormalFormResult {
        roots,
        change_of_basis: q,
        block_matrix: block,
        residual,
    })
}

/// A Fisher structure together with its roots in plane order.
#[derive(Clone, Debug)]
pub struct LinearFisherStructure {
    pub repr: FisherForm,
    pub roots: Vec<f64>,
}

fn is_orthogonal(q: &RealMatrix, tol: f64) -> bool {
    let n = q.nrows();
    q.ncols() == n && max_abs_real(&(q.transpose() * q - RealMatrix::identity(n, n))) <= tol
}

/// Roots of a real form that is block diagonal in the planes spanned by
/// consecutive column pairs of `frame`.
pub fn plane_roots(j: &RealMatrix, frame: &RealMatrix, tol: f64) -> Result<Vec<f64>> {
    let b = frame.transpose() * j * frame;
    let k = b.nrows() / 2;
    let scale = max_abs_real(&b).max(1.0);
    for r in 0..b.nrows() {
        for c in 0..b.ncols() {
            if r / 2 != c / 2 && b[(r, c)].abs() > tol * scale {
                return Err(Error::ScalingBreaksStructure);
            }
        }
    }
    Ok((0..k).map(|p| b[(2 * p + 1, 2 * p)].abs()).collect())
}

/// Positive scaling `q · J`: block-diagonal left multiplication by
/// `diag(q_k)` in the plane decomposition.
///
/// For the complex form the planes are the coordinate lines of `Cⁿ`; for the
/// real form they are consecutive column pairs of `planes` (identity when
/// `None`). `J` must leave every plane invariant where `q` is not constant.
pub fn scaling_action(
    q: &[f64],
    m: &FisherForm,
    planes: Option<&RealMatrix>,
    tol: &Tolerances,
) -> Result<LinearFisherStructure> {
    if let Some((index, &value)) = q
        .iter()
        .enumerate()
        .find(|(_, &v)| v <= 0.0 || !v.is_finite())
    {
        return Err(Error::NonPositiveScale { index, value });
    }
    let diag = is_fisher_structure(m, tol.verification);
    if !diag.is_fisher {
        return Err(Error::NotFisherStructure(diag.failure.unwrap_or_default()));
    }
    match m {
        FisherForm::Complex(j) => {
            let n = j.nrows();
            if q.len() != n {
                return Err(Error::DimensionMismatch {
                    left: q.len(),
                    right: n,
                });
            }
            let scaled = ComplexMatrix::from_fn(n, n, |r, c| j[(r, c)] * q[r]);
            let out = FisherForm::Complex(scaled);
            let check = is_fisher_structure(&out, tol.verification);
            if !check.is_fisher {
                return Err(Error::ScalingBreaksStructure);
            }
            Ok(LinearFisherStructure {
                roots: check.roots,
                repr: out,
            })
        }
        FisherForm::Real(j) => {
            let dim = j.nrows();
            if 2 * q.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: 2 * q.len(),
                    right: dim,
                });
            }
            let frame = planes
                .cloned()
                .unwrap_or_else(|| RealMatrix::identity(dim, dim));
            if frame.nrows() != dim || !is_orthogonal(&frame, 1e-10) {
                return Err(Error::Malformed(
                    "plane frame must be an orthogonal matrix".into(),
                ));
            }
            let roots = plane_roots(j, &frame, tol.verification)?;
            let scale = RealMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                dim,
                q.iter().flat_map(|&x| [x, x]),
            ));
            let scaled = &frame * scale * frame.transpose() * j;
            Ok(LinearFisherStructure {
                roots: roots.iter().zip(q).map(|(d, s)| d * s).collect(),
                repr: FisherForm::Real(scaled),
            })
        }
    }
}

/// The unique `q` with `q · a = b` for structures sharing a plane
/// decomposition: `q_k = d_k(b) / d_k(a)`.
pub fn scale_between(a: &LinearFisherStructure, b: &LinearFisherStructure) -> Result<Vec<f64>> {
    if a.roots.len() != b.roots.len() {
        return Err(Error::DimensionMismatch {
            left: a.roots.len(),
            right: b.roots.len(),
        });
    }
    Ok(a.roots.iter().zip(&b.roots).map(|(x, y)| y / x).collect())
}

#[derive(Clone, Debug)]
pub struct UnitaryIntersection {
    /// Diagonal of `Q = D^{-1/2}`.
    pub q: Vec<f64>,
    pub unitary: ComplexMatrix,
    /// `max |(QJ)(QJ)* − I|`.
    pub residual: f64,
}

/// `Q = D^{-1/2}` where `J² = −D`; `QJ` is the unitary point of the scaling
/// orbit of `J`.
pub fn unitary_intersection(m: &ComplexMatrix, tol: f64) -> Result<UnitaryIntersection> {
    let diag = is_fisher_structure(&FisherForm::Complex(m.clone()), tol);
    if !diag.is_fisher {
        return Err(Error::NotFisherStructure(diag.failure.unwrap_or_default()));
    }
    let n = m.nrows();
    let q: Vec<f64> = diag.roots.iter().map(|d| 1.0 / d).collect();
    let unitary = ComplexMatrix::from_fn(n, n, |r, c| m[(r, c)] * q[r]);
    let residual = crate::herm::unitarity_residual(&unitary);
    Ok(UnitaryIntersection {
        q,
        unitary,
        residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifoldFisherReport {
    pub pass: bool,
    /// Sorted roots of the first sample.
    pub roots: Vec<f64>,
    /// Samples that are not Fisher structures.
    pub non_members: Vec<usize>,
    /// `(sample, max relative root deviation)` for samples whose roots drift.
    pub drift: Vec<(usize, f64)>,
}

/// Every sample is a Fisher structure and the root multiset is constant.
pub fn manifold_fisher_check(samples: &[FisherForm], tol: &Tolerances) -> ManifoldFisherReport {
    let mut non_members = Vec::new();
    let mut drift = Vec::new();
    let mut reference: Option<Vec<f64>> = None;
    for (k, m) in samples.iter().enumerate() {
        let d = is_fisher_structure(m, tol.verification);
        if !d.is_fisher {
            non_members.push(k);
            continue;
        }
        let mut roots = d.roots;
        roots.sort_by(|a, b| b.total_cmp(a));
        match &reference {
            None => reference = Some(roots),
            Some(r) => {
                let dev = if r.len() != roots.len() {
                    f64::INFINITY
                } else {
                    r.iter()
                        .zip(&roots)
                        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
                        .fold(0.0, f64::max)
                };
                if dev > tol.root_cluster {
                    drift.push((k, dev));
                }
            }
        }
    }
    ManifoldFisherReport {
        pass: non_members.is_empty() && drift.is_empty(),
        roots: reference.unwrap_or_default(),
        non_members,
        drift,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> RealMatrix {
        let g = RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        g.qr().q()
    }

    #[test]
    fn membership_examples() {
        let j0 = FisherForm::Real(standard_real(3));
        let d = is_fisher_structure(&j0, 1e-10);
        assert!(d.is_fisher);
        assert!(d.roots.iter().all(|&r| (r - 1.0).abs() < 1e-14));

        let j = FisherForm::Real(block_diagonal(&[2.0, 1.0]));
        let d = is_fisher_structure(&j, 1e-10);
        assert!(d.is_fisher);
        assert_abs_diff_eq!(d.roots[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.roots[1], 1.0, epsilon = 1e-14);

        let sym = FisherForm::Real(RealMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]));
        let d = is_fisher_structure(&sym, 1e-10);
        assert!(!d.is_fisher);
        assert_eq!(d.failure.as_deref(), Some("not skew-adjoint"));

        let singular = FisherForm::Real(block_diagonal(&[1.0, 0.0]));
        assert!(!is_fisher_structure(&singular, 1e-10).is_fisher);
    }

    #[test]
    fn complex_membership_requires_orthogonal_rows() {
        // skew-adjoint but rows (i, 1), (−1, i) are not orthogonal
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 1.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 1.0),
            ],
        );
        let d = is_fisher_structure(&FisherForm::Complex(m), 1e-10);
        assert!(!d.is_fisher);
        assert_eq!(
            d.failure.as_deref(),
            Some("rows are not pairwise orthogonal")
        );

        let ok = FisherForm::Complex(diagonal_complex(&[2.0, 0.5]));
        let d = is_fisher_structure(&ok, 1e-10);
        assert!(d.is_fisher);
        assert_eq!(d.roots, vec![2.0, 0.5]);
    }

    #[test]
    fn complex_structures_are_fisher_with_unit_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for n in 1..6 {
            // J = U (i·diag(±1)) U† squares to −I
            let u = sample::random_unitary(n, &mut rng);
            let signs: Vec<f64> = (0..n)
                .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
                .collect();
            let j = &u * diagonal_complex(&signs) * u.adjoint();
            let d = is_fisher_structure(&FisherForm::Complex(j), 1e-10);
            assert!(d.is_fisher);
            assert!(d.roots.iter().all(|&r| (r - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn normal_form_examples() {
        let nf = normal_form(&FisherForm::Real(standard_real(3)), &tol()).unwrap();
        assert_eq!(nf.roots.len(), 1);
        assert_abs_diff_eq!(nf.roots[0].0, 1.0, epsilon = 1e-12);
        assert_eq!(nf.roots[0].1, 3);
        assert!(nf.residual <= 1e-10);

        // J² = −diag(4,4,9,9)
        let nf = normal_form(&FisherForm::Real(block_diagonal(&[2.0, 3.0])), &tol()).unwrap();
        assert_abs_diff_eq!(nf.roots[0].0, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nf.roots[1].0, 2.0, epsilon = 1e-12);
        assert_eq!((nf.roots[0].1, nf.roots[1].1), (1, 1));

        let nf = normal_form(&FisherForm::Complex(diagonal_complex(&[2.0, 2.0])), &tol()).unwrap();
        assert_eq!(nf.roots.len(), 1);
        assert_eq!(nf.roots[0].1, 2);

        assert!(normal_form(&FisherForm::Real(RealMatrix::identity(2, 2)), &tol()).is_err());
    }

    #[test]
    fn normal_form_round_trip_under_orthogonal_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let k = rng.random_range(1..5);
            let mut roots: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..3.0)).collect();
            if k > 1 && rng.random_bool(0.5) {
                roots[1] = roots[0];
            }
            let q = random_orthogonal(2 * k, &mut rng);
            let j = &q * block_diagonal(&roots) * q.transpose();
            let nf = normal_form(&FisherForm::Real(j.clone()), &tol()).unwrap();
            assert!(nf.residual <= 1e-10);
            let qn = &nf.change_of_basis;
            assert!(max_abs_real(&(qn.transpose() * &j * qn - &nf.block_matrix)) < 1e-10);
            let mut expected = roots.clone();
            expected.sort_by(|a, b| b.total_cmp(a));
            let recovered: Vec<f64> = nf
                .roots
                .iter()
                .flat_map(|&(d, m)| std::iter::repeat_n(d, m))
                .collect();
            assert_eq!(recovered.len(), expected.len());
            for (a, b) in recovered.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn eigenvalues_are_imaginary_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..20 {
            let k = rng.random_range(1..5);
            let roots: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..3.0)).collect();
            let q = random_orthogonal(2 * k, &mut rng);
            let j = &q * block_diagonal(&roots) * q.transpose();
            let ev = j.complex_eigenvalues();
            assert!(ev.iter().all(|z| z.re.abs() <= 1e-10));
        }
    }

    #[test]
    fn scaling_examples() {
        let j0 = FisherForm::Complex(diagonal_complex(&[1.0, 1.0]));
        let same = scaling_action(&[1.0, 1.0], &j0, None, &tol()).unwrap();
        assert_eq!(same.repr, j0);

        let one = FisherForm::Complex(diagonal_complex(&[1.0]));
        let s = scaling_action(&[2.0], &one, None, &tol()).unwrap();
        assert_eq!(s.roots, vec![2.0]);

        assert!(matches!(
            scaling_action(&[0.0, 1.0], &j0, None, &tol()),
            Err(Error::NonPositiveScale { index: 0, .. })
        ));

        // off-diagonal complex structure on C²: non-constant q breaks skew-adjointness
        let coupled = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::default(),
                Complex64::new(-1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::default(),
            ],
        );
        assert!(matches!(
            scaling_action(&[2.0, 1.0], &FisherForm::Complex(coupled), None, &tol()),
            Err(Error::ScalingBreaksStructure)
        ));
    }

    #[test]
    fn scaling_is_a_free_transitive_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..30 {
            let k = rng.random_range(1..5);
            let roots: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..3.0)).collect();
            let frame = random_orthogonal(2 * k, &mut rng);
            let j = FisherForm::Real(&frame * block_diagonal(&roots) * frame.transpose());
            let q1: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..4.0)).collect();
            let q2: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..4.0)).collect();
            let q12: Vec<f64> = q1.iter().zip(&q2).map(|(a, b)| a * b).collect();

            let inner = scaling_action(&q2, &j, Some(&frame), &tol()).unwrap();
            let outer = scaling_action(&q1, &inner.repr, Some(&frame), &tol()).unwrap();
            let direct = scaling_action(&q12, &j, Some(&frame), &tol()).unwrap();
            let diff = max_abs_real(&(outer.repr.realify() - direct.repr.realify()));
            assert!(diff <= 1e-12 * max_abs_real(&direct.repr.realify()).max(1.0));
            assert!(is_fisher_structure(&direct.repr, 1e-10).is_fisher);
            for ((r, d), q) in direct.roots.iter().zip(&roots).zip(&q12) {
                assert!((r - d * q).abs() < 1e-12);
            }

            // transitivity within the decomposition, and freeness
            let base = LinearFisherStructure {
                repr: j.clone(),
                roots: plane_roots(&j.realify(), &frame, 1e-10).unwrap(),
            };
            let q = scale_between(&base, &direct).unwrap();
            for (a, b) in q.iter().zip(&q12) {
                assert!((a - b).abs() < 1e-12);
            }
            let fixed = scale_between(&base, &base).unwrap();
            assert!(fixed.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn unitary_intersection_examples() {
        let u = unitary_intersection(&diagonal_complex(&[1.0, 1.0, 1.0]), 1e-10).unwrap();
        assert_eq!(u.q, vec![1.0, 1.0, 1.0]);
        let two = diagonal_complex(&[2.0, 2.0]);
        let u = unitary_intersection(&two, 1e-10).unwrap();
        assert_eq!(u.q, vec![0.5, 0.5]);
        assert!(max_abs(&(u.unitary - diagonal_complex(&[1.0, 1.0]))) < 1e-15);
        assert!(unitary_intersection(&ComplexMatrix::identity(2, 2), 1e-10).is_err());
    }

    #[test]
    fn manifold_check_examples() {
        let constant: Vec<FisherForm> =
            (0..5).map(|_| FisherForm::Real(standard_real(2))).collect();
        assert!(manifold_fisher_check(&constant, &tol()).pass);

        let mut varying = constant.clone();
        varying.push(FisherForm::Real(block_diagonal(&[1.0, 1.5])));
        let r = manifold_fisher_check(&varying, &tol());
        assert!(!r.pass);
        assert_eq!(r.drift.len(), 1);
        assert_eq!(r.drift[0].0, 5);
    }
}
