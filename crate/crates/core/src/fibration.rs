//! Orbit fibrations `𝒪(η₀) → 𝒪(ρ₀)` for `𝔥^(η₀) ⊆ 𝔥^(ρ₀)`.
//!
//! With both reference points diagonal, stabilizer inclusion is the same as
//! the degeneracy partition of `ρ₀` coarsening that of `η₀`. The total
//! normal space then splits into a vertical part (roots active for `η₀` but
//! inside a block of `ρ₀`) and a horizontal part (roots active for `ρ₀`).
//! Frames are ordered vertical first, then horizontal, each in lexicographic
//! root order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::{d_map, fisher_structure, fisher_tensor, l_map};
use crate::herm::{bracket_unchecked, HermitianMatrix, RealMatrix};
use crate::kks::{invariant_complex_structure, kks_matrix, min_singular_value, trace_product};
use crate::linfisher::{is_fisher_structure, FisherForm};
use crate::orbit::{
    phi_map, project_to_normal, project_to_stabilizer, LambdaState, OrbitPoint, RootIndex,
};
use crate::report::{CheckReport, CompatibilityReport};
use crate::sample;
use crate::sweep;
use crate::tol::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FibrationDims {
    pub total: usize,
    pub fibre: usize,
    pub base: usize,
}

#[derive(Clone, Debug)]
pub struct OrbitFibration {
    pub total: LambdaState,
    pub base: LambdaState,
    /// Root data evaluated on `η₀`.
    pub vertical_roots: Vec<RootIndex>,
    pub horizontal_roots: Vec<RootIndex>,
    pub dims: FibrationDims,
}

pub fn fibration_new(total: LambdaState, base: LambdaState) -> Result<OrbitFibration> {
    let n = total.n();
    if base.n() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: base.n(),
        });
    }
    let refines = (0..n).all(|i| (0..n).all(|j| !total.same_block(i, j) || base.same_block(i, j)));
    if !refines {
        return Err(Error::StabilizerInclusion {
            total: total.partition_labels(),
            base: base.partition_labels(),
        });
    }
    let (horizontal_roots, vertical_roots): (Vec<RootIndex>, Vec<RootIndex>) = total
        .active_roots()
        .into_iter()
        .partition(|r| !base.same_block(r.i, r.j));
    let dims = FibrationDims {
        total: total.orbit_dim(),
        fibre: base.stabilizer_dim() - total.stabilizer_dim(),
        base: base.orbit_dim(),
    };
    if dims.total != dims.fibre + dims.base || dims.fibre != 2 * vertical_roots.len() {
        return Err(Error::Malformed(format!(
            "inconsistent dimension bookkeeping {dims:?}"
        )));
    }
    Ok(OrbitFibration {
        total,
        base,
        vertical_roots,
        horizontal_roots,
        dims,
    })
}

impl OrbitFibration {
    /// Positions in the total chart frame, vertical first.
    pub fn split_order(&self) -> Vec<usize> {
        let active = self.total.active_roots();
        let position = |r: &RootIndex| {
            active
                .iter()
                .position(|a| a.i == r.i && a.j == r.j)
                .unwrap()
        };
        self.vertical_roots
            .iter()
            .chain(&self.horizontal_roots)
            .flat_map(|r| {
                let p = position(r);
                [2 * p, 2 * p + 1]
            })
            .collect()
    }

    pub fn vertical_len(&self) -> usize {
        2 * self.vertical_roots.len()
    }

    fn frame(roots: &[RootIndex], n: usize) -> Vec<HermitianMatrix> {
        roots
            .iter()
            .flat_map(|r| [r.s().matrix(n), r.a().matrix(n)])
            .collect()
    }

    pub fn vertical_frame(&self) -> Vec<HermitianMatrix> {
        Self::frame(&self.vertical_roots, self.total.n())
    }

    pub fn horizontal_frame(&self) -> Vec<HermitianMatrix> {
        Self::frame(&self.horizontal_roots, self.total.n())
    }

    /// Reorders a matrix given on the total chart frame into the split frame.
    pub fn to_split_frame(&self, m: &RealMatrix) -> RealMatrix {
        let order = self.split_order();
        RealMatrix::from_fn(order.len(), order.len(), |a, b| m[(order[a], order[b])])
    }
}

/// `π(Ad_g η₀) = Ad_g ρ₀`.
pub fn projection(
    fib: &OrbitFibration,
    point: &OrbitPoint,
    tol: &Tolerances,
) -> Result<OrbitPoint> {
    let drift = if point.n() == fib.total.n() {
        point
            .state()
            .lambda()
            .iter()
            .zip(fib.total.lambda())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    } else {
        f64::INFINITY
    };
    if drift > tol.verification {
        return Err(Error::NotOnOrbit { residual: drift });
    }
    let g = point.diagonalizer();
    let rebuilt = fib.total.rho0().conjugate_by(g);
    let residual = (point.rho() - &rebuilt).max_abs();
    if residual > tol.verification {
        return Err(Error::NotOnOrbit { residual });
    }
    OrbitPoint::from_unitary(&fib.base, g.clone(), tol)
}

/// `Ω^(η₀)(ad_V η, ad_N η)` for vertical `V` and horizontal `N` at the
/// reference point and at `samples` random points, plus nondegeneracy of
/// `Ω^(η₀)` restricted to the vertical frame.
pub fn check_symplectic_orthogonality(
    fib: &OrbitFibration,
    samples: usize,
    seed: u64,
    tol: f64,
) -> CompatibilityReport {
    let n = fib.total.n();
    let vertical = fib.vertical_frame();
    let horizontal = fib.horizontal_frame();
    let residuals = sweep::map_indices(samples + 1, |k| {
        let g = if k == 0 {
            crate::herm::ComplexMatrix::identity(n, n)
        } else {
            let mut rng = sample::sample_rng(seed, 0xF1B0, k as u64);
            sample::random_unitary(n, &mut rng)
        };
        let eta = fib.total.rho0().conjugate_by(&g);
        let v: Vec<HermitianMatrix> = vertical.iter().map(|x| x.conjugate_by(&g)).collect();
        let h: Vec<HermitianMatrix> = horizontal.iter().map(|x| x.conjugate_by(&g)).collect();
        let mut worst = 0.0_f64;
        for a in &v {
            for b in &h {
                worst = worst.max(trace_product(&eta, &bracket_unchecked(a, b)).abs());
            }
        }
        worst
    });
    let eta0 = fib.total.rho0();
    let restricted = RealMatrix::from_fn(vertical.len(), vertical.len(), |a, b| {
        trace_product(&eta0, &bracket_unchecked(&vertical[a], &vertical[b]))
    });
    let sigma = min_singular_value(&restricted);
    let mut report = CompatibilityReport::default();
    report.push(CheckReport::max_residual(
        "fibration.symplectic_orthogonality",
        &residuals,
        tol,
    ));
    report.push(CheckReport::lower_bound(
        "fibration.vertical_nondegenerate",
        &[if vertical.is_empty() {
            f64::INFINITY
        } else {
            sigma
        }],
        0.0,
    ));
    report
}

/// `[𝒱, 𝒱] ⊆ 𝔥^(ρ₀)` and `[𝒩, 𝒱] ⊆ 𝔫^(ρ₀)` on the frames.
pub fn check_involutivity(fib: &OrbitFibration, tol: f64) -> CompatibilityReport {
    let vertical = fib.vertical_frame();
    let horizontal = fib.horizontal_frame();
    let mut vv = vec![0.0_f64];
    let mut hv = vec![0.0_f64];
    for a in &vertical {
        for b in &vertical {
            vv.push(project_to_normal(&bracket_unchecked(a, b), &fib.base).max_abs());
        }
        for b in &horizontal {
            hv.push(project_to_stabilizer(&bracket_unchecked(b, a), &fib.base).max_abs());
        }
    }
    let mut report = CompatibilityReport::default();
    report.push(CheckReport::max_residual(
        "fibration.vertical_bracket_closure",
        &vv,
        tol,
    ));
    report.push(CheckReport::max_residual(
        "fibration.horizontal_vertical_bracket",
        &hv,
        tol,
    ));
    report
}

/// Matrix of a linear map on the normal space in the transported frame at
/// `point`: column `b` holds the frame coordinates of `f(frame_b)`.
fn operator_matrix<F>(point: &OrbitPoint, frame: &[HermitianMatrix], f: F) -> Result<RealMatrix>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    let basis = point.state().normal_frame();
    let k = frame.len();
    let mut m = RealMatrix::zeros(k, k);
    for (col, x) in frame.iter().enumerate() {
        let y = point.pull_back(&f(x)?);
        for (row, b) in basis.iter().enumerate() {
            m[(row, col)] = b.coefficient(&y);
        }
    }
    Ok(m)
}

fn cross_block(m: &RealMatrix, v: usize) -> f64 {
    let k = m.nrows();
    let mut worst = 0.0_f64;
    for a in 0..v {
        for b in v..k {
            worst = worst.max(m[(a, b)].abs()).max(m[(b, a)].abs());
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockDiagonalityReport {
    pub checks: CompatibilityReport,
    /// `max |F^(η₀)|_horizontal − F^(ρ₀)|`; informational only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizontal_vs_base: Option<f64>,
}

/// Cross blocks (vertical ↔ horizontal) of `𝔇, 𝔏, Φ, Ω, F, J, 𝔍` in the
/// split frame, at the reference point and at `samples` random points.
/// Also checks that the vertical block of `𝔍` is a Fisher structure with
/// roots `β_I/α_I`.
pub fn check_tensor_block_diagonality(
    fib: &OrbitFibration,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<BlockDiagonalityReport> {
    let n = fib.total.n();
    let v = fib.vertical_len();
    let per_point = sweep::map_indices(samples + 1, |k| -> Result<[f64; 7]> {
        let point = if k == 0 {
            OrbitPoint::reference(&fib.total)
        } else {
            let mut rng = sample::sample_rng(seed, 0xB10C, k as u64);
            let g = sample::random_unitary(n, &mut rng);
            OrbitPoint::from_unitary(&fib.total, g, &Tolerances::default())?
        };
        let frame = point.transported_frame();
        let tangents = point.tangent_frame();
        let d = operator_matrix(&point, &frame, |x| d_map(&point, x))?;
        let l = operator_matrix(&point, &tangents, |t| l_map(&point, t, 1e-9))?;
        let phi = operator_matrix(&point, &tangents, |t| phi_map(&point, t, 1e-9))?;
        let omega = kks_matrix(&point)?.matrix;
        let f = fisher_tensor(&point)?.f;
        let j = invariant_complex_structure(&fib.total).matrix;
        let fj = fisher_structure(&point)?.j;
        Ok([d, l, phi, omega, f, j, fj].map(|m| cross_block(&fib.to_split_frame(&m), v)))
    });
    let per_point: Vec<[f64; 7]> = per_point.into_iter().collect::<Result<_>>()?;
    let names = ["D", "L", "Phi", "Omega", "F", "J", "FisherJ"];
    let mut checks = CompatibilityReport::default();
    for (c, name) in names.iter().enumerate() {
        let residuals: Vec<f64> = per_point.iter().map(|r| r[c]).collect();
        checks.push(CheckReport::max_residual(
            format!("fibration.block_diagonal.{name}"),
            &residuals,
            tol,
        ));
    }

    let reference = OrbitPoint::reference(&fib.total);
    let fj = fib.to_split_frame(&fisher_structure(&reference)?.j);
    let vertical_block = fj.view((0, 0), (v, v)).into_owned();
    let (member, roots_residual) = if v == 0 {
        (true, 0.0)
    } else {
        let diag = is_fisher_structure(&FisherForm::Real(vertical_block), tol);
        let mut expected: Vec<f64> = fib
            .vertical_roots
            .iter()
            .map(|r| r.beta / r.alpha)
            .collect();
        expected.sort_by(|a, b| b.total_cmp(a));
        let residual = expected
            .iter()
            .zip(&diag.roots)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs() / a.max(1.0)));
        (diag.is_fisher, residual)
    };
    checks.push(CheckReport::all_true(
        "fibration.vertical_fisher_structure",
        &[member],
    ));
    checks.push(CheckReport::max_residual(
        "fibration.vertical_fisher_roots",
        &[roots_residual],
        tol,
    ));

    let horizontal_vs_base = fisher_tensor(&OrbitPoint::reference(&fib.base))
        .ok()
        .map(|base| {
            let f = fib.to_split_frame(&fisher_tensor(&reference).map(|t| t.f).unwrap_or_default());
            let k = f.nrows();
            if k == v || base.f.nrows() != k - v {
                return f64::NAN;
            }
            crate::herm::max_abs_real(&(f.view((v, v), (k - v, k - v)) - &base.f))
        });
    Ok(BlockDiagonalityReport {
        checks,
        horizontal_vs_base: horizontal_vs_base.filter(|x| x.is_finite()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FibreFactor {
    /// 1-based indices of the `ρ₀` block.
    pub block: Vec<usize>,
    pub sub_spectrum: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FibreOrbit {
    pub factors: Vec<FibreFactor>,
    pub dim: usize,
}

/// Fibre as a product of orbits of the `η₀` sub-spectra inside each block of
/// `ρ₀`: a block of size `m` split into multiplicities `m_k` contributes
/// `m² − Σ m_k²`.
pub fn fibre_orbit(fib: &OrbitFibration) -> FibreOrbit {
    let lambda = fib.total.lambda();
    let factors: Vec<FibreFactor> = fib
        .base
        .blocks()
        .iter()
        .map(|b| {
            let multiplicities: Vec<usize> = fib
                .total
                .blocks()
                .iter()
                .filter(|t| t.start >= b.start && t.end <= b.end)
                .map(|t| t.len())
                .collect();
            let dim = b.len() * b.len() - multiplicities.iter().map(|m| m * m).sum::<usize>();
            FibreFactor {
                block: b.clone().map(|k| k + 1).collect(),
                sub_spectrum: lambda[b.clone()].to_vec(),
                multiplicities,
                dim,
            }
        })
        .collect();
    FibreOrbit {
        dim: factors.iter().map(|f| f.dim).sum(),
        factors,
    }
}

/// Every fibration check. Thresholds default to `1e−10` for orthogonality
/// and block diagonality and `1e−12` for bracket closure; `tol` overrides
/// all of them.
pub fn check_all(
    fib: &OrbitFibration,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<CompatibilityReport> {
    let mut report = CompatibilityReport::default();
    let fibre = fibre_orbit(fib);
    report.push(CheckReport::all_true(
        "fibration.dimension_additivity",
        &[fib.dims.total == fib.dims.fibre + fib.dims.base && fibre.dim == fib.dims.fibre],
    ));
    report.extend(check_symplectic_orthogonality(
        fib,
        samples,
        seed,
        tol.unwrap_or(1e-10),
    ));
    report.extend(check_involutivity(fib, tol.unwrap_or(1e-12)));
    report.extend(
        check_tensor_block_diagonality(fib, samples.min(4), seed, tol.unwrap_or(1e-10))?.checks,
    );
    Ok(report)
}
