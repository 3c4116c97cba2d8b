//! Hermitian matrix primitives.
//!
//! Everything in this crate lives on `i·u(n)`, the real vector space of
//! n×n Hermitian matrices. The Lie bracket is `[A,B] = i(AB − BA)`, which
//! keeps brackets of Hermitian matrices Hermitian, and the invariant pairing
//! is `Tr(AB)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RealMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// `‖U U† − I‖_max`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u * u.adjoint() - ComplexMatrix::identity(n, n)))
}

/// An n×n Hermitian matrix, stored exactly Hermitian.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianMatrix{}", self.0)
    }
}

impl HermitianMatrix {
    /// Validates squareness, finiteness and `‖M − M†‖_max ≤ tol`, then
    /// stores the symmetrized matrix.
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        check_square(&m)?;
        let residual = max_abs(&(&m - m.adjoint()));
        if residual > tol {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self::symmetrize(m))
    }

    /// Projects an arbitrary square matrix onto its Hermitian part.
    pub fn symmetrize(m: ComplexMatrix) -> Self {
        let adj = m.adjoint();
        Self((m + adj) * c(0.5))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self(ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(d[i])
            } else {
                Complex64::default()
            }
        }))
    }

    /// Builds a real symmetric matrix as a Hermitian one.
    pub fn from_real_symmetric(m: &RealMatrix) -> Self {
        Self::symmetrize(m.map(c))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    /// `g H g†`.
    pub fn conjugate_by(&self, g: &ComplexMatrix) -> Self {
        Self::symmetrize(g * &self.0 * g.adjoint())
    }

    /// `g† H g`.
    pub fn conjugate_by_inverse(&self, g: &ComplexMatrix) -> Self {
        Self::symmetrize(g.adjoint() * &self.0 * g)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(&self.0 * c(s))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&HermitianMatrix> for &HermitianMatrix {
            type Output = HermitianMatrix;
            fn $method(self, rhs: &HermitianMatrix) -> HermitianMatrix {
                HermitianMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $trait<HermitianMatrix> for HermitianMatrix {
            type Output = HermitianMatrix;
            fn $method(self, rhs: HermitianMatrix) -> HermitianMatrix {
                HermitianMatrix(self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);

impl Neg for HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        HermitianMatrix(-self.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, s: f64) -> HermitianMatrix {
        self.scaled(s)
    }
}

impl Mul<f64> for HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, s: f64) -> HermitianMatrix {
        self.scaled(s)
    }
}

fn same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `[A,B] = i(AB − BA)`.
pub fn bracket(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    same_dim(a, b)?;
    Ok(bracket_unchecked(a, b))
}

pub(crate) fn bracket_unchecked(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    let comm = &a.0 * &b.0 - &b.0 * &a.0;
    HermitianMatrix::symmetrize(comm * I)
}

/// `{A,B} = AB + BA`.
pub fn anticommutator(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    same_dim(a, b)?;
    Ok(anticommutator_unchecked(a, b))
}

pub(crate) fn anticommutator_unchecked(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> HermitianMatrix {
    HermitianMatrix::symmetrize(&a.0 * &b.0 + &b.0 * &a.0)
}

/// `Tr(AB)`; real for Hermitian arguments.
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    same_dim(a, b)?;
    Ok(hs_inner_unchecked(a, b))
}

pub(crate) fn hs_inner_unchecked(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a.0[(i, j)] * b.0[(j, i)]).re;
        }
    }
    acc
}

/// Which of the two Hermitian matrices attached to an off-diagonal slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisKind {
    /// `s_ij = e_ij + e_ji`
    Symmetric,
    /// `a_ij = i(e_ij − e_ji)`
    Antisymmetric,
}

/// Element of the off-diagonal Hermitian basis. Indices are 0-based with
/// `i < j`; labels are 1-based (`s_12`, `a_12`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OffDiagBasisElement {
    pub i: usize,
    pub j: usize,
    pub kind: BasisKind,
}

impl OffDiagBasisElement {
    pub fn symmetric(i: usize, j: usize) -> Self {
        assert!(i < j, "off-diagonal basis needs i < j");
        Self {
            i,
            j,
            kind: BasisKind::Symmetric,
        }
    }

    pub fn antisymmetric(i: usize, j: usize) -> Self {
        assert!(i < j, "off-diagonal basis needs i < j");
        Self {
            i,
            j,
            kind: BasisKind::Antisymmetric,
        }
    }

    pub fn matrix(&self, n: usize) -> HermitianMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        match self.kind {
            BasisKind::Symmetric => {
                m[(self.i, self.j)] = c(1.0);
                m[(self.j, self.i)] = c(1.0);
            }
            BasisKind::Antisymmetric => {
                m[(self.i, self.j)] = I;
                m[(self.j, self.i)] = -I;
            }
        }
        HermitianMatrix(m)
    }

    /// Coordinate of `x` along this element: `Tr(x·b)/Tr(b·b)` with `Tr(b·b) = 2`.
    pub fn coefficient(&self, x: &HermitianMatrix) -> f64 {
        let z = x.entry(self.j, self.i);
        // Tr(x s) = x_ji + x_ij = 2 Re x_ji ; Tr(x a) = i x_ji − i x_ij = −2 Im x_ji
        match self.kind {
            BasisKind::Symmetric => z.re,
            BasisKind::Antisymmetric => -z.im,
        }
    }

    pub fn label(&self) -> String {
        let prefix = match self.kind {
            BasisKind::Symmetric => 's',
            BasisKind::Antisymmetric => 'a',
        };
        format!("{}_{}{}", prefix, self.i + 1, self.j + 1)
    }
}

/// Result of [`eigendecompose_canonical`]: `H = U diag(values) U†`.
#[derive(Clone, Debug)]
pub struct CanonicalEigen {
    pub unitary: ComplexMatrix,
    pub values: Vec<f64>,
}

/// Eigendecomposition with descending eigenvalues and a deterministic basis.
///
/// Every column has its first largest-modulus component real positive. Inside
/// a degenerate cluster the basis is rebuilt by Gram–Schmidt on the cluster
/// projector applied to `e_0, e_1, …`, so the output does not depend on the
/// solver's arbitrary choice within the eigenspace.
pub fn eigendecompose_canonical(h: &HermitianMatrix, tol: f64) -> Result<CanonicalEigen> {
    let n = h.dim();
    if n == 0 {
        return Ok(CanonicalEigen {
            unitary: ComplexMatrix::zeros(0, 0),
            values: Vec::new(),
        });
    }
    let eig = SymmetricEigen::try_new(h.0.clone(), 1e-15, 10_000)
        .ok_or(Error::EigenNonConvergence { residual: f64::NAN })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();

    let mut unitary = ComplexMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && crate::tol::close_relative(values[start], values[end], tol) {
            end += 1;
        }
        if end - start == 1 {
            let mut v = eig.eigenvectors.column(order[start]).into_owned();
            fix_phase(&mut v);
            unitary.set_column(start, &v);
        } else {
            let cols: Vec<usize> = order[start..end].to_vec();
            let block = eig.eigenvectors.select_columns(cols.iter());
            let projector = &block * block.adjoint();
            let mut accepted: Vec<nalgebra::DVector<Complex64>> = Vec::new();
            for k in 0..n {
                if accepted.len() == end - start {
                    break;
                }
                let mut w = projector.column(k).into_owned();
                for u in &accepted {
                    let overlap = u.dotc(&w);
                    w -= u * overlap;
                }
                let norm = w.norm();
                if norm > 1e-6 {
                    w /= c(norm);
                    fix_phase(&mut w);
                    accepted.push(w);
                }
            }
            if accepted.len() != end - start {
                return Err(Error::EigenNonConvergence { residual: f64::NAN });
            }
            for (offset, v) in accepted.iter().enumerate() {
                unitary.set_column(start + offset, v);
            }
        }
        start = end;
    }

    let diag = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        values.iter().map(|&v| c(v)),
    ));
    let residual = max_abs(&(&unitary * diag * unitary.adjoint() - &h.0));
    let scale = h.max_abs().max(1.0);
    if residual > tol.max(1e-10) * scale {
        return Err(Error::EigenNonConvergence { residual });
    }
    Ok(CanonicalEigen { unitary, values })
}

fn fix_phase(v: &mut nalgebra::DVector<Complex64>) {
    let max = v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if max == 0.0 {
        return;
    }
    // first component within rounding of the maximum modulus
    let anchor = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[anchor].conj() / v[anchor].norm();
    *v *= phase;
    v[anchor] = c(v[anchor].re);
}

/// `exp(iX)` for Hermitian `X`, via its eigendecomposition.
pub fn unitary_exp(x: &HermitianMatrix) -> ComplexMatrix {
    let n = x.dim();
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let eig = SymmetricEigen::new(x.0.clone());
    let phases = nalgebra::DVector::from_iterator(
        n,
        eig.eigenvalues
            .iter()
            .map(|&mu| Complex64::from_polar(1.0, mu)),
    );
    let v = &eig.eigenvectors;
    v * ComplexMatrix::from_diagonal(&phases) * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s12() -> HermitianMatrix {
        OffDiagBasisElement::symmetric(0, 1).matrix(2)
    }

    fn a12() -> HermitianMatrix {
        OffDiagBasisElement::antisymmetric(0, 1).matrix(2)
    }

    #[test]
    fn bracket_of_s_and_a() {
        // s a = i(−e11 + e22), a s = i(e11 − e22), i(sa − as) = 2(e11 − e22)
        let b = bracket(&s12(), &a12()).unwrap();
        let expected = HermitianMatrix::from_diagonal(&[2.0, -2.0]);
        assert!((b - expected).max_abs() < 1e-15);
    }

    #[test]
    fn bracket_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = sample::random_hermitian(4, &mut rng);
        assert_eq!(bracket(&h, &h).unwrap().max_abs(), 0.0);
        let d1 = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let d2 = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        assert_eq!(bracket(&d1, &d2).unwrap().max_abs(), 0.0);
        assert!(matches!(
            bracket(&d1, &HermitianMatrix::identity(3)),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn anticommutator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = sample::random_hermitian(3, &mut rng);
        let r = anticommutator(&HermitianMatrix::identity(3), &a).unwrap();
        assert!((r - a.scaled(2.0)).max_abs() < 1e-14);

        let (l1, l2) = (0.7, 0.2);
        let r = anticommutator(&s12(), &HermitianMatrix::from_diagonal(&[l1, l2])).unwrap();
        assert!((r - s12().scaled(l1 + l2)).max_abs() < 1e-15);

        let e11 = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let e22 = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        assert_eq!(anticommutator(&e11, &e22).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn hs_inner_examples() {
        assert_eq!(
            hs_inner(&HermitianMatrix::identity(4), &HermitianMatrix::identity(4)).unwrap(),
            4.0
        );
        assert_eq!(hs_inner(&s12(), &a12()).unwrap(), 0.0);
        assert_eq!(hs_inner(&s12(), &s12()).unwrap(), 2.0);
        assert_eq!(hs_inner(&a12(), &a12()).unwrap(), 2.0);
    }

    #[test]
    fn coefficient_matches_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = sample::random_hermitian(4, &mut rng);
        for (i, j) in [(0, 1), (1, 3), (0, 3)] {
            for b in [
                OffDiagBasisElement::symmetric(i, j),
                OffDiagBasisElement::antisymmetric(i, j),
            ] {
                let expected = hs_inner(&x, &b.matrix(4)).unwrap() / 2.0;
                assert_abs_diff_eq!(b.coefficient(&x), expected, epsilon = 1e-14);
            }
        }
        assert_eq!(OffDiagBasisElement::antisymmetric(1, 3).label(), "a_24");
    }

    #[test]
    fn eigen_of_diagonal_is_a_permutation() {
        let h = HermitianMatrix::from_diagonal(&[0.25, 0.75]);
        let e = eigendecompose_canonical(&h, 1e-9).unwrap();
        assert_eq!(e.values, vec![0.75, 0.25]);
        assert_eq!(e.unitary[(1, 0)], c(1.0));
        assert_eq!(e.unitary[(0, 1)], c(1.0));
        assert_eq!(e.unitary[(0, 0)].norm(), 0.0);
    }

    #[test]
    fn eigen_of_identity_is_canonical() {
        let e = eigendecompose_canonical(&HermitianMatrix::identity(4), 1e-9).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-14));
        assert!(max_abs(&(e.unitary - ComplexMatrix::identity(4, 4))) < 1e-14);
    }

    #[test]
    fn eigen_round_trip_and_idempotence() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let u0 = sample::random_unitary(2, &mut rng);
            let h = HermitianMatrix::from_diagonal(&[0.7, 0.3]).conjugate_by(&u0);
            let e = eigendecompose_canonical(&h, 1e-9).unwrap();
            assert_abs_diff_eq!(e.values[0], 0.7, epsilon = 1e-12);
            assert_abs_diff_eq!(e.values[1], 0.3, epsilon = 1e-12);
            assert!(unitarity_residual(&e.unitary) < 1e-12);

            let rebuilt = HermitianMatrix::from_diagonal(&e.values).conjugate_by(&e.unitary);
            let again = eigendecompose_canonical(&rebuilt, 1e-9).unwrap();
            assert!(max_abs(&(&again.unitary - &e.unitary)) < 1e-10);
        }
    }

    #[test]
    fn degenerate_cluster_basis_is_solver_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h0 = HermitianMatrix::from_diagonal(&[0.5, 0.25, 0.25]);
        let u = sample::random_unitary(3, &mut rng);
        let h = h0.conjugate_by(&u);
        let e1 = eigendecompose_canonical(&h, 1e-9).unwrap();
        // same matrix, perturbed only by symmetrization rounding
        let h2 = HermitianMatrix::symmetrize(h.matrix().clone());
        let e2 = eigendecompose_canonical(&h2, 1e-9).unwrap();
        assert!(max_abs(&(&e1.unitary - &e2.unitary)) < 1e-8);
        let rebuilt = HermitianMatrix::from_diagonal(&e1.values).conjugate_by(&e1.unitary);
        assert!((rebuilt - h).max_abs() < 1e-12);
    }

    /// Scaling-and-squaring Taylor series, independent of the eigen route.
    fn exp_series(x: &HermitianMatrix) -> ComplexMatrix {
        let n = x.dim();
        let a = x.matrix() * I;
        let norm = a.norm();
        let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let a = a * c(0.5_f64.powi(squarings));
        let mut term = ComplexMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &a * c(1.0 / k as f64);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn unitary_exp_examples() {
        let zero = unitary_exp(&HermitianMatrix::zeros(3));
        assert!(max_abs(&(zero - ComplexMatrix::identity(3, 3))) < 1e-15);

        // exp(i θ a_12) = [[cos θ, −sin θ], [sin θ, cos θ]]
        let u = unitary_exp(&a12().scaled(std::f64::consts::FRAC_PI_2));
        let expected = ComplexMatrix::from_row_slice(2, 2, &[c(0.0), c(-1.0), c(1.0), c(0.0)]);
        assert!(max_abs(&(&u - expected)) < 1e-14);
        assert!(max_abs(&(u - exp_series(&a12().scaled(std::f64::consts::FRAC_PI_2)))) < 1e-12);
    }

    #[test]
    fn unitary_exp_is_unitary_and_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for k in 0..100 {
            let n = 2 + k % 5;
            let x = sample::random_hermitian(n, &mut rng);
            let u = unitary_exp(&x);
            assert!(unitarity_residual(&u) <= 1e-12);
            assert!(max_abs(&(&u - exp_series(&x))) < 1e-10);
            let minus = unitary_exp(&x.scaled(-1.0));
            assert!(max_abs(&(u.adjoint() - minus)) <= 1e-12);
        }
    }

    #[test]
    fn hermitian_constructor_rejects_bad_input() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(0.0), c(1.0)]);
        assert!(matches!(
            HermitianMatrix::new(m, 1e-12),
            Err(Error::NotHermitian { .. })
        ));
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            HermitianMatrix::new(m, 1e-12),
            Err(Error::NotSquare { .. })
        ));
        let m = ComplexMatrix::from_element(2, 2, c(f64::NAN));
        assert_eq!(HermitianMatrix::new(m, 1e-12), Err(Error::NonFinite));
    }
}
