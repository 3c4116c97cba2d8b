//! Λ-mixed states and the reference-point data of their orbits.
//!
//! A state is a descending spectrum `Λ` with `Σλ = 1`; its orbit is the set of
//! density matrices `g diag(Λ) g†`. The Lie algebra splits as
//! `𝔥 ⊕ 𝔫` (stabilizer ⊕ normal space), where `𝔫` is spanned by the pairs
//! `(s_I, a_I)` over the active roots `I = (i,j)`, i.e. those with `λ_i ≠ λ_j`.
//! Chart coordinates `(x_I, y_I)` multiply `(s_I, a_I)`, so the chart map is
//! `ρ = exp(iX) ρ₀ exp(−iX)` with `X = Σ x_I s_I + y_I a_I`.
//!
//! Sign convention: `[s_I, ρ₀] = −α_I a_I` and `[a_I, ρ₀] = α_I s_I` with
//! `α_I = λ_i − λ_j > 0`.

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm::{
    self, bracket, eigendecompose_canonical, unitary_exp, ComplexMatrix, HermitianMatrix,
    OffDiagBasisElement, I,
};
use crate::tol::{close_relative, Tolerances};

/// A validated descending spectrum together with its degeneracy partition.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaState {
    lambda: Vec<f64>,
    degeneracy_tol: f64,
    blocks: Vec<Range<usize>>,
}

/// Root `α_ij = e_i − e_j` evaluated on the reference point, with its
/// anticommutator partner `β_ij = e_i + e_j`. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootIndex {
    pub i: usize,
    pub j: usize,
    pub alpha: f64,
    pub beta: f64,
    pub active: bool,
}

impl RootIndex {
    pub fn label(&self) -> String {
        format!("{}{}", self.i + 1, self.j + 1)
    }

    pub fn s(&self) -> OffDiagBasisElement {
        OffDiagBasisElement::symmetric(self.i, self.j)
    }

    pub fn a(&self) -> OffDiagBasisElement {
        OffDiagBasisElement::antisymmetric(self.i, self.j)
    }
}

impl LambdaState {
    /// Sorts `lambda` descending and validates it as a spectrum of a density
    /// matrix. Entries in `[-tol, 0)` are clamped to zero.
    pub fn new(lambda: &[f64], tol: &Tolerances) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut sorted = lambda.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        for (index, v) in sorted.iter_mut().enumerate() {
            if *v < -tol.construction {
                return Err(Error::NegativeEigenvalue { index, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = sorted.iter().sum();
        if (sum - 1.0).abs()
            > tol
                .construction
                .max(8.0 * f64::EPSILON * sorted.len() as f64)
        {
            return Err(Error::TraceNotOne { sum });
        }

        let mut blocks = Vec::new();
        let mut start = 0;
        for k in 1..=sorted.len() {
            if k == sorted.len() || !close_relative(sorted[start], sorted[k], tol.degeneracy) {
                blocks.push(start..k);
                start = k;
            }
        }
        Ok(Self {
            lambda: sorted,
            degeneracy_tol: tol.degeneracy,
            blocks,
        })
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    /// Degeneracy blocks as ranges of consecutive indices.
    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    pub fn block_of(&self, index: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&index))
            .expect("index within dimension")
    }

    /// Partition as 1-based index lists, for diagnostics.
    pub fn partition_labels(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.clone().map(|i| i + 1).collect())
            .collect()
    }

    pub fn rho0(&self) -> HermitianMatrix {
        HermitianMatrix::from_diagonal(&self.lambda)
    }

    /// All roots `i < j` in lexicographic order.
    pub fn roots(&self) -> Vec<RootIndex> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(RootIndex {
                    i,
                    j,
                    alpha: self.lambda[i] - self.lambda[j],
                    beta: self.lambda[i] + self.lambda[j],
                    active: self.block_of(i) != self.block_of(j),
                });
            }
        }
        out
    }

    pub fn active_roots(&self) -> Vec<RootIndex> {
        self.roots().into_iter().filter(|r| r.active).collect()
    }

    /// `(s_I, a_I)` pairs over the active roots, flattened: the chart frame.
    pub fn normal_frame(&self) -> Vec<OffDiagBasisElement> {
        self.active_roots()
            .iter()
            .flat_map(|r| [r.s(), r.a()])
            .collect()
    }

    pub fn frame_labels(&self) -> Vec<String> {
        self.normal_frame().iter().map(|b| b.label()).collect()
    }

    pub fn stabilizer_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.len() * b.len()).sum()
    }

    /// Real dimension `n² − Σ m_k²`.
    pub fn orbit_dim(&self) -> usize {
        self.n() * self.n() - self.stabilizer_dim()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lambda.iter().all(|&x| x > self.degeneracy_tol)
    }

    /// `Λ = (1, 0, …, 0)`.
    pub fn is_pure(&self) -> bool {
        close_relative(self.lambda[0], 1.0, self.degeneracy_tol)
            && self.lambda[1..]
                .iter()
                .all(|&x| x.abs() <= self.degeneracy_tol)
    }

    pub(crate) fn same_block(&self, i: usize, j: usize) -> bool {
        self.block_of(i) == self.block_of(j)
    }
}

/// Bases of `𝔥^(ρ₀)` and `𝔫^(ρ₀)`.
#[derive(Clone, Debug)]
pub struct SplittingReport {
    pub stabilizer_basis: Vec<HermitianMatrix>,
    pub normal_basis: Vec<(OffDiagBasisElement, OffDiagBasisElement)>,
    pub orbit_dim: usize,
}

pub fn splitting(state: &LambdaState) -> SplittingReport {
    let n = state.n();
    let mut stabilizer_basis: Vec<HermitianMatrix> = (0..n)
        .map(|k| {
            let mut d = vec![0.0; n];
            d[k] = 1.0;
            HermitianMatrix::from_diagonal(&d)
        })
        .collect();
    let mut normal_basis = Vec::new();
    for r in state.roots() {
        if r.active {
            normal_basis.push((r.s(), r.a()));
        } else {
            stabilizer_basis.push(r.s().matrix(n));
            stabilizer_basis.push(r.a().matrix(n));
        }
    }
    SplittingReport {
        orbit_dim: 2 * normal_basis.len(),
        stabilizer_basis,
        normal_basis,
    }
}

/// A point `ρ = g ρ₀ g†` on the orbit of `state`, with its diagonalizer `g`.
#[derive(Clone, Debug)]
pub struct OrbitPoint {
    rho: HermitianMatrix,
    diagonalizer: ComplexMatrix,
    state: LambdaState,
}

impl OrbitPoint {
    pub fn reference(state: &LambdaState) -> Self {
        let n = state.n();
        Self {
            rho: state.rho0(),
            diagonalizer: ComplexMatrix::identity(n, n),
            state: state.clone(),
        }
    }

    /// `Ad_g ρ₀`; checks unitarity of `g` and re-validates the spectrum.
    pub fn from_unitary(state: &LambdaState, g: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        herm::check_square(&g)?;
        if g.nrows() != state.n() {
            return Err(Error::DimensionMismatch {
                left: g.nrows(),
                right: state.n(),
            });
        }
        let residual = herm::unitarity_residual(&g);
        if residual > tol.verification {
            return Err(Error::NotUnitary { residual });
        }
        let rho = state.rho0().conjugate_by(&g);
        let eig = eigendecompose_canonical(&rho, tol.degeneracy)?;
        let drift = spectrum_drift(&eig.values, state.lambda());
        if drift > tol.verification {
            return Err(Error::NotOnOrbit { residual: drift });
        }
        Ok(Self {
            rho,
            diagonalizer: g,
            state: state.clone(),
        })
    }

    /// Locates a density matrix on the orbit, using the canonical
    /// eigendecomposition as diagonalizer.
    pub fn from_density(
        state: &LambdaState,
        rho: &HermitianMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        if rho.dim() != state.n() {
            return Err(Error::DimensionMismatch {
                left: rho.dim(),
                right: state.n(),
            });
        }
        let eig = eigendecompose_canonical(rho, tol.degeneracy)?;
        let drift = spectrum_drift(&eig.values, state.lambda());
        if drift > tol.verification {
            return Err(Error::NotOnOrbit { residual: drift });
        }
        Ok(Self {
            rho: rho.clone(),
            diagonalizer: eig.unitary,
            state: state.clone(),
        })
    }

    pub fn rho(&self) -> &HermitianMatrix {
        &self.rho
    }

    pub fn diagonalizer(&self) -> &ComplexMatrix {
        &self.diagonalizer
    }

    pub fn state(&self) -> &LambdaState {
        &self.state
    }

    pub fn n(&self) -> usize {
        self.state.n()
    }

    /// `Ad_g X = g X g†`.
    pub fn push_forward(&self, x: &HermitianMatrix) -> HermitianMatrix {
        x.conjugate_by(&self.diagonalizer)
    }

    /// `Ad_{g⁻¹} X = g† X g`.
    pub fn pull_back(&self, x: &HermitianMatrix) -> HermitianMatrix {
        x.conjugate_by_inverse(&self.diagonalizer)
    }

    /// Normal frame transported to this point: `Ad_g s_I, Ad_g a_I`.
    pub fn transported_frame(&self) -> Vec<HermitianMatrix> {
        let n = self.n();
        self.state
            .normal_frame()
            .iter()
            .map(|b| self.push_forward(&b.matrix(n)))
            .collect()
    }

    /// Tangent vectors `ad_X ρ` of the transported frame.
    pub fn tangent_frame(&self) -> Vec<HermitianMatrix> {
        self.transported_frame()
            .iter()
            .map(|x| herm::bracket_unchecked(x, &self.rho))
            .collect()
    }
}

fn spectrum_drift(found: &[f64], expected: &[f64]) -> f64 {
    found
        .iter()
        .zip(expected)
        .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
}

/// Coordinates `(x_I, y_I)` over the active roots, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartVector {
    pub coords: Vec<[f64; 2]>,
}

impl ChartVector {
    pub fn zeros(state: &LambdaState) -> Self {
        Self {
            coords: vec![[0.0, 0.0]; state.active_roots().len()],
        }
    }

    /// `X = Σ x_I s_I + y_I a_I`.
    pub fn generator(&self, state: &LambdaState) -> Result<HermitianMatrix> {
        let roots = state.active_roots();
        if roots.len() != self.coords.len() {
            return Err(Error::ChartSizeMismatch {
                expected: roots.len(),
                got: self.coords.len(),
            });
        }
        if self.coords.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = state.n();
        let mut m = ComplexMatrix::zeros(n, n);
        for (r, &[x, y]) in roots.iter().zip(&self.coords) {
            // x s + y a has (i,j) entry x + iy
            m[(r.i, r.j)] = Complex64::new(x, y);
            m[(r.j, r.i)] = Complex64::new(x, -y);
        }
        Ok(HermitianMatrix::symmetrize(m))
    }
}

pub fn lambda_state_new(lambda: &[f64], tol: &Tolerances) -> Result<LambdaState> {
    LambdaState::new(lambda, tol)
}

/// Chart by exponentiation: `g = exp(iX)`, `ρ = g ρ₀ g†`.
pub fn exp_chart(state: &LambdaState, coords: &ChartVector) -> Result<OrbitPoint> {
    let x = coords.generator(state)?;
    let g = unitary_exp(&x);
    let rho = state.rho0().conjugate_by(&g);
    Ok(OrbitPoint {
        rho,
        diagonalizer: g,
        state: state.clone(),
    })
}

/// `ad_X ρ = [X, ρ]`.
pub fn tangent_vector(point: &OrbitPoint, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    bracket(x, point.rho())
}

/// The unique `X ∈ Ad_g 𝔫^(ρ₀)` with `[X, ρ] = v`.
///
/// `v` is pulled back to the reference point; its components on the
/// stabilizer (diagonal and same-block entries) must vanish within
/// `tol · max(1, ‖v‖)`.
pub fn phi_map(point: &OrbitPoint, v: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    let n = point.n();
    if v.dim() != n {
        return Err(Error::DimensionMismatch {
            left: v.dim(),
            right: n,
        });
    }
    let state = point.state();
    let v0 = point.pull_back(v);
    let lambda = state.lambda();
    let mut residual = 0.0_f64;
    let mut x0 = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let z = v0.entry(k, l);
            if state.same_block(k, l) {
                residual = residual.max(z.norm());
            } else {
                // [X, ρ₀]_kl = −i (λ_k − λ_l) X_kl
                x0[(k, l)] = I * z / (lambda[k] - lambda[l]);
            }
        }
    }
    if residual > tol * v.max_abs().max(1.0) {
        return Err(Error::NotTangent { residual });
    }
    Ok(point.push_forward(&HermitianMatrix::symmetrize(x0)))
}

/// Trace-orthogonal projection onto `𝔫^(ρ₀)`.
pub fn project_to_normal(x: &HermitianMatrix, state: &LambdaState) -> HermitianMatrix {
    let n = state.n();
    let m = ComplexMatrix::from_fn(n, n, |k, l| {
        if state.same_block(k, l) {
            Complex64::default()
        } else {
            x.entry(k, l)
        }
    });
    HermitianMatrix::symmetrize(m)
}

/// Trace-orthogonal projection onto `𝔥^(ρ₀)`.
pub fn project_to_stabilizer(x: &HermitianMatrix, state: &LambdaState) -> HermitianMatrix {
    x - &project_to_normal(x, state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::{hs_inner, max_abs};
    use crate::sample;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn st(l: &[f64]) -> LambdaState {
        LambdaState::new(l, &tol()).unwrap()
    }

    #[test]
    fn state_constructor_examples() {
        let s = st(&[0.25, 0.75]);
        assert_eq!(s.lambda(), &[0.75, 0.25]);
        let s = st(&[0.5, 0.5]);
        assert_eq!(s.blocks().len(), 1);
        assert!(matches!(
            LambdaState::new(&[0.7, 0.4], &tol()),
            Err(Error::TraceNotOne { .. })
        ));
        assert!(matches!(
            LambdaState::new(&[1.2, -0.2], &tol()),
            Err(Error::NegativeEigenvalue { .. })
        ));
        assert_eq!(LambdaState::new(&[], &tol()), Err(Error::EmptySpectrum));
    }

    #[test]
    fn splitting_examples() {
        let r = splitting(&st(&[0.75, 0.25]));
        assert_eq!(r.orbit_dim, 2);
        assert_eq!(
            r.normal_basis,
            vec![(
                OffDiagBasisElement::symmetric(0, 1),
                OffDiagBasisElement::antisymmetric(0, 1)
            )]
        );

        let r = splitting(&st(&[0.5, 0.5]));
        assert_eq!(r.orbit_dim, 0);
        assert!(r.normal_basis.is_empty());

        let s = st(&[1.0, 0.0, 0.0]);
        let r = splitting(&s);
        assert_eq!(r.orbit_dim, 4);
        let active: Vec<_> = s.active_roots().iter().map(|r| (r.i, r.j)).collect();
        assert_eq!(active, vec![(0, 1), (0, 2)]);
        assert_eq!(r.stabilizer_basis.len() + 2 * r.normal_basis.len(), 9);
    }

    #[test]
    fn stabilizer_commutes_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..7 {
            let s = sample::random_degenerate_state(n, &mut rng, &tol());
            let rho0 = s.rho0();
            for h in splitting(&s).stabilizer_basis {
                assert_eq!(bracket(&h, &rho0).unwrap().max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn root_eigenrelations() {
        let s = st(&[0.5, 0.3, 0.2]);
        let rho0 = s.rho0();
        for r in s.roots() {
            let bs = bracket(&r.s().matrix(3), &rho0).unwrap();
            let ba = bracket(&r.a().matrix(3), &rho0).unwrap();
            assert!((bs + r.a().matrix(3).scaled(r.alpha)).max_abs() < 1e-15);
            assert!((ba - r.s().matrix(3).scaled(r.alpha)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn normal_gram_is_nonsingular() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 2..7 {
            let s = sample::random_degenerate_state(n, &mut rng, &tol());
            let p = OrbitPoint::reference(&s);
            let t = p.tangent_frame();
            let k = t.len();
            let gram = nalgebra::DMatrix::from_fn(k, k, |a, b| hs_inner(&t[a], &t[b]).unwrap());
            if k > 0 {
                let min_sv = gram.singular_values().min();
                assert!(min_sv > 1e-6, "n={n} gram singular");
            }
        }
    }

    #[test]
    fn exp_chart_examples() {
        let s = st(&[0.75, 0.25]);
        let p = exp_chart(&s, &ChartVector::zeros(&s)).unwrap();
        assert_eq!(p.rho(), &s.rho0());
        assert!(max_abs(&(p.diagonalizer() - ComplexMatrix::identity(2, 2))) < 1e-15);

        let p = exp_chart(
            &s,
            &ChartVector {
                coords: vec![[std::f64::consts::FRAC_PI_4, 0.0]],
            },
        )
        .unwrap();
        // exp(iπ/4 s) = cos(π/4) I + i sin(π/4) s
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let g = ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(h, 0.0),
                Complex64::new(0.0, h),
                Complex64::new(0.0, h),
                Complex64::new(h, 0.0),
            ],
        );
        let expected = s.rho0().conjugate_by(&g);
        assert!((p.rho() - &expected).max_abs() < 1e-14);
        assert!(p.rho().entry(0, 1).norm() > 0.1);
        let e = eigendecompose_canonical(p.rho(), 1e-9).unwrap();
        assert_abs_diff_eq!(e.values[0], 0.75, epsilon = 1e-12);

        assert!(matches!(
            exp_chart(&s, &ChartVector { coords: vec![] }),
            Err(Error::ChartSizeMismatch {
                expected: 1,
                got: 0
            })
        ));
    }

    #[test]
    fn exp_chart_round_trip_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 2..7 {
            for _ in 0..10 {
                let s = sample::random_degenerate_state(n, &mut rng, &tol());
                let c = sample::random_chart(&s, 2.0, &mut rng);
                let p = exp_chart(&s, &c).unwrap();
                let e = eigendecompose_canonical(p.rho(), 1e-9).unwrap();
                for (a, b) in e.values.iter().zip(s.lambda()) {
                    assert!((a - b).abs() <= 1e-10);
                }
            }
        }
    }

    /// Rank of the chart differential at 0 by central differences.
    #[test]
    fn orbit_dim_matches_chart_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in 2..6 {
            let s = sample::random_degenerate_state(n, &mut rng, &tol());
            // full coordinate set: every off-diagonal pair plus diagonal
            let h = 1e-5;
            let mut cols: Vec<Vec<f64>> = Vec::new();
            let mut gens: Vec<HermitianMatrix> = Vec::new();
            for r in s.roots() {
                gens.push(r.s().matrix(n));
                gens.push(r.a().matrix(n));
            }
            for k in 0..n {
                let mut d = vec![0.0; n];
                d[k] = 1.0;
                gens.push(HermitianMatrix::from_diagonal(&d));
            }
            for x in &gens {
                let plus = s.rho0().conjugate_by(&unitary_exp(&x.scaled(h)));
                let minus = s.rho0().conjugate_by(&unitary_exp(&x.scaled(-h)));
                let d = (plus - minus).scaled(0.5 / h);
                cols.push(d.matrix().iter().flat_map(|z| [z.re, z.im]).collect());
            }
            let m = nalgebra::DMatrix::from_fn(2 * n * n, cols.len(), |r, c| cols[c][r]);
            let svs = m.singular_values();
            let rank = svs.iter().filter(|&&v| v > 1e-6).count();
            assert_eq!(rank, s.orbit_dim(), "n={n} Λ={:?}", s.lambda());
        }
    }

    #[test]
    fn tangent_vector_examples() {
        let s = st(&[0.75, 0.25]);
        let p = OrbitPoint::reference(&s);
        let diag = HermitianMatrix::from_diagonal(&[0.3, -1.0]);
        assert_eq!(tangent_vector(&p, &diag).unwrap().max_abs(), 0.0);
        let v = tangent_vector(&p, &OffDiagBasisElement::symmetric(0, 1).matrix(2)).unwrap();
        // i(λ₂ − λ₁) · i(e_12 − e_21)
        let expected = OffDiagBasisElement::antisymmetric(0, 1)
            .matrix(2)
            .scaled(-0.5);
        assert!((v.clone() - expected).max_abs() < 1e-15);
        assert_abs_diff_eq!(hs_inner(&v, &v).unwrap(), 2.0 * 0.25, epsilon = 1e-15);
    }

    #[test]
    fn tangent_vector_is_equivariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for n in 2..7 {
            let s = sample::random_positive_state(n, &mut rng, &tol());
            let g = sample::random_unitary(n, &mut rng);
            let p0 = OrbitPoint::reference(&s);
            let p = OrbitPoint::from_unitary(&s, g.clone(), &tol()).unwrap();
            let x = sample::random_hermitian(n, &mut rng);
            let lhs = tangent_vector(&p, &x.conjugate_by(&g)).unwrap();
            let rhs = tangent_vector(&p0, &x).unwrap().conjugate_by(&g);
            assert!((lhs - rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn phi_map_examples() {
        let s = st(&[0.75, 0.25]);
        let p = OrbitPoint::reference(&s);
        assert_eq!(
            phi_map(&p, &HermitianMatrix::zeros(2), 1e-10)
                .unwrap()
                .max_abs(),
            0.0
        );
        let s12 = OffDiagBasisElement::symmetric(0, 1).matrix(2);
        let v = bracket(&s12, &s.rho0()).unwrap();
        assert!((phi_map(&p, &v, 1e-10).unwrap() - s12).max_abs() < 1e-15);
        let diag = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            phi_map(&p, &diag, 1e-10),
            Err(Error::NotTangent { .. })
        ));
    }

    #[test]
    fn phi_map_inverts_ad_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for n in 2..7 {
            for _ in 0..10 {
                let s = sample::random_degenerate_state(n, &mut rng, &tol());
                let c = sample::random_chart(&s, 1.5, &mut rng);
                let p = exp_chart(&s, &c).unwrap();
                let v = tangent_vector(&p, &sample::random_hermitian(n, &mut rng)).unwrap();
                let x = phi_map(&p, &v, 1e-9).unwrap();
                assert!((bracket(&x, p.rho()).unwrap() - v).max_abs() <= 1e-10);
                // X lies in the transported normal space
                let back = p.pull_back(&x);
                assert!(project_to_stabilizer(&back, &s).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let s = st(&[0.75, 0.25]);
        let d = HermitianMatrix::from_diagonal(&[0.4, 0.1]);
        assert_eq!(project_to_normal(&d, &s).max_abs(), 0.0);
        let s12 = OffDiagBasisElement::symmetric(0, 1).matrix(2);
        assert_eq!(project_to_normal(&s12, &s), s12);
        let flat = st(&[0.5, 0.5]);
        assert_eq!(project_to_normal(&s12, &flat).max_abs(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = st(&[0.4, 0.4, 0.2]);
        let x = sample::random_hermitian(3, &mut rng);
        let once = project_to_normal(&x, &s);
        assert_eq!(project_to_normal(&once, &s), once);
        assert!(
            hs_inner(&once, &project_to_stabilizer(&x, &s))
                .unwrap()
                .abs()
                < 1e-14
        );
    }

    #[test]
    fn from_density_finds_the_orbit() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let s = st(&[0.5, 0.3, 0.2]);
        let g = sample::random_unitary(3, &mut rng);
        let rho = s.rho0().conjugate_by(&g);
        let p = OrbitPoint::from_density(&s, &rho, &tol()).unwrap();
        assert!((s.rho0().conjugate_by(p.diagonalizer()) - rho).max_abs() < 1e-12);
        let other = st(&[0.6, 0.3, 0.1]);
        assert!(matches!(
            OrbitPoint::from_density(&other, p.rho(), &tol()),
            Err(Error::NotOnOrbit { .. })
        ));
    }
}
