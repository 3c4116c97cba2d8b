//! Verification suites over random states.
//!
//! Each suite draws its samples from `sample_rng(seed, stream, index)` and
//! reduces per-sample residuals into named [`CheckReport`]s, so a report is a
//! pure function of the configuration.

use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibration::{self, OrbitFibration};
use crate::fisher::{
    self, anticommutator_root_residual, chart_tangent, eval_root_identity,
    fisher_structure_from_tensor, fisher_tensor, fisher_tensor_chart, RootIdentityProbe,
};
use crate::herm::{anticommutator_unchecked, max_abs, max_abs_real, ComplexMatrix, RealMatrix};
use crate::kks::{self, fit_proportionality, kahler_triple, kks_matrix, min_singular_value};
use crate::linfisher::{
    block_diagonal, is_fisher_structure, manifold_fisher_check, normal_form, plane_roots,
    scale_between, scaling_action, unitary_intersection, FisherForm, LinearFisherStructure,
};
use crate::orbit::{exp_chart, LambdaState, OrbitPoint};
use crate::report::{CheckReport, CompatibilityReport};
use crate::sample::{self, sample_rng};
use crate::sweep;
use crate::tol::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Kks,
    Fisher,
    Fibration,
    Linfisher,
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Scope::All),
            "kks" => Ok(Scope::Kks),
            "fisher" => Ok(Scope::Fisher),
            "fibration" => Ok(Scope::Fibration),
            "linfisher" => Ok(Scope::Linfisher),
            other => Err(Error::Malformed(format!(
                "unknown verification scope '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random states per suite and dimension.
    pub samples: usize,
    pub min_n: usize,
    pub max_n: usize,
    /// Replaces every upper-bound threshold when set.
    pub tol: Option<f64>,
    pub fibration_pairs: usize,
    pub fibration_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 100,
            min_n: 2,
            max_n: 6,
            tol: None,
            fibration_pairs: 10,
            fibration_points: 20,
        }
    }
}

impl VerifyConfig {
    fn threshold(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn dims(&self) -> std::ops::RangeInclusive<usize> {
        self.min_n.max(2)..=self.max_n
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub scope: Scope,
    pub seed: u64,
    pub samples: usize,
    pub n_range: [usize; 2],
    pub pass: bool,
    pub checks: CompatibilityReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub root_identity: Vec<RootIdentityProbe>,
}

pub fn run(scope: Scope, config: &VerifyConfig) -> Result<VerifyReport> {
    if config.max_n < config.min_n.max(2) {
        return Err(Error::Malformed(format!(
            "empty dimension range {}..={}",
            config.min_n, config.max_n
        )));
    }
    let mut checks = CompatibilityReport::default();
    let mut root_identity = Vec::new();
    if matches!(scope, Scope::All | Scope::Kks) {
        checks.extend(kks_suite(config));
    }
    if matches!(scope, Scope::All | Scope::Fisher) {
        let (report, probes) = fisher_suite(config);
        checks.extend(report);
        root_identity = probes;
    }
    if matches!(scope, Scope::All | Scope::Fibration) {
        checks.extend(fibration_suite(config)?);
    }
    if matches!(scope, Scope::All | Scope::Linfisher) {
        checks.extend(linfisher_suite(config));
    }
    Ok(VerifyReport {
        scope,
        seed: config.seed,
        samples: config.samples,
        n_range: [config.min_n.max(2), config.max_n],
        pass: checks.all_pass(),
        checks,
        root_identity,
    })
}

/// Upper-bound check `name ≤ default` or lower-bound check `name > bound`.
enum Bound {
    Upper(&'static str, f64),
    Lower(&'static str, f64),
}

/// Rows of per-sample values, one column per bound. `NaN` marks "not
/// evaluated for this sample"; errors should be reported as `INFINITY`
/// (upper) or `NEG_INFINITY` (lower).
fn reduce(bounds: &[Bound], rows: &[Vec<f64>], config: &VerifyConfig) -> CompatibilityReport {
    let mut report = CompatibilityReport::default();
    for (c, bound) in bounds.iter().enumerate() {
        let values: Vec<f64> = rows.iter().map(|r| r[c]).filter(|v| !v.is_nan()).collect();
        report.push(match *bound {
            Bound::Upper(name, default) => {
                CheckReport::max_residual(name, &values, config.threshold(default))
            }
            Bound::Lower(name, bound) => CheckReport::lower_bound(name, &values, bound),
        });
    }
    report
}

fn samples_over_dims<F>(dims: &[usize], count: usize, f: F) -> Vec<Vec<f64>>
where
    F: Fn(usize, u64) -> Vec<f64> + Sync + Send,
{
    sweep::map_indices(dims.len() * count, |k| {
        f(dims[k / count], (k % count) as u64)
    })
}

fn rel(residual: f64, scale: f64) -> f64 {
    residual / scale.max(1.0)
}

const KKS_STREAM: u64 = 0x4B4B_5300;
const FISHER_STREAM: u64 = 0xF15E_0000;
const FIBRATION_STREAM: u64 = 0xF1B0_0000;
const LINFISHER_STREAM: u64 = 0x11F0_0000;

fn random_point<R: Rng + ?Sized>(state: &LambdaState, rng: &mut R) -> OrbitPoint {
    let chart = sample::random_chart(state, 1.0, rng);
    exp_chart(state, &chart).expect("chart sized from the state")
}

pub fn kks_suite(config: &VerifyConfig) -> CompatibilityReport {
    let tol = Tolerances::default();
    let dims: Vec<usize> = config.dims().collect();
    let bounds = [
        Bound::Upper("kks.antisymmetry", 1e-14),
        Bound::Upper("kks.equivariance", 1e-10),
        Bound::Upper("kks.closedness_jacobi", 1e-10),
        Bound::Lower("kks.nondegenerate", 1e-12),
        Bound::Lower("kks.kahler_metric_positive", 0.0),
        Bound::Upper("kks.kahler_metric_symmetric", 1e-9),
        Bound::Upper("kks.j_preserves_omega", 1e-9),
        Bound::Upper("kks.j_isometry", 1e-9),
        Bound::Upper("kks.j_squared", 1e-9),
    ];
    let rows = samples_over_dims(&dims, config.samples, |n, k| {
        let mut rng = sample_rng(config.seed, KKS_STREAM + n as u64, k);
        let state = if k % 2 == 0 {
            sample::random_positive_state(n, &mut rng, &tol)
        } else {
            sample::random_degenerate_state(n, &mut rng, &tol)
        };
        let point = random_point(&state, &mut rng);
        let mut row = vec![f64::NAN; 9];
        let omega = match kks_matrix(&point) {
            Ok(o) => o.matrix,
            Err(_) => {
                row[3] = f64::NEG_INFINITY;
                return row;
            }
        };
        row[0] = max_abs_real(&(&omega + omega.transpose()));
        if k < 50 {
            let u = sample::random_unitary(n, &mut rng);
            row[1] = OrbitPoint::from_unitary(&state, u * point.diagonalizer(), &tol)
                .and_then(|moved| kks_matrix(&moved))
                .map(|moved| max_abs_real(&(moved.matrix - &omega)))
                .unwrap_or(f64::INFINITY);
        }
        let x = sample::random_hermitian(n, &mut rng);
        let y = sample::random_hermitian(n, &mut rng);
        let z = sample::random_hermitian(n, &mut rng);
        row[2] = kks::jacobi_cyclic(point.rho(), &x, &y, &z).abs();
        row[3] = if omega.is_empty() {
            f64::INFINITY
        } else {
            min_singular_value(&omega)
        };
        match kahler_triple(&point) {
            Ok(t) => {
                let r = t.residuals();
                row[4] = r.g_min_eigenvalue;
                row[5] = r.g_symmetric;
                row[6] = r.j_preserves_omega;
                row[7] = r.j_isometry;
                row[8] = r.j_squared;
            }
            Err(_) => {
                row[4] = f64::NEG_INFINITY;
            }
        }
        row
    });
    let mut report = reduce(&bounds, &rows, config);

    let pure: Vec<f64> = pure_dims(config)
        .map(|n| {
            let state = pure_state(n);
            let g = kahler_triple(&OrbitPoint::reference(&state)).map(|t| t.g);
            let fs = kks::fubini_study_in_chart_frame(&state);
            match (g, fs) {
                (Ok(g), Ok(fs)) => {
                    let (c, residual) = fit_proportionality(&g, &fs);
                    if c > 0.0 {
                        residual
                    } else {
                        f64::INFINITY
                    }
                }
                _ => f64::INFINITY,
            }
        })
        .collect();
    report.push(CheckReport::max_residual(
        "kks.pure_fubini_study",
        &pure,
        config.threshold(1e-9),
    ));
    report
}

fn pure_dims(config: &VerifyConfig) -> impl Iterator<Item = usize> {
    config.min_n.max(2)..=config.max_n.min(4)
}

fn pure_state(n: usize) -> LambdaState {
    let mut l = vec![0.0; n];
    l[0] = 1.0;
    LambdaState::new(&l, &Tolerances::default()).expect("pure state")
}

/// Relative deviation of the spectrum of `j` from `±i d` over `roots`.
fn imaginary_pair_residual(j: &RealMatrix, roots: &[f64]) -> f64 {
    let ev = j.complex_eigenvalues();
    let scale = roots.iter().fold(1.0_f64, |a, &b| a.max(b));
    let mut found: Vec<f64> = ev.iter().map(|z| z.im).collect();
    let mut expected: Vec<f64> = roots.iter().flat_map(|&d| [d, -d]).collect();
    found.sort_by(f64::total_cmp);
    expected.sort_by(f64::total_cmp);
    let re = ev.iter().fold(0.0_f64, |a, z| a.max(z.re.abs()));
    let im = found
        .iter()
        .zip(&expected)
        .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs() / y.abs().max(1.0)));
    im.max(re / scale)
}

pub fn fisher_suite(config: &VerifyConfig) -> (CompatibilityReport, Vec<RootIdentityProbe>) {
    let tol = Tolerances::default();
    let dims: Vec<usize> = config.dims().collect();
    let bounds = [
        Bound::Upper("fisher.sld_equation", 1e-10),
        Bound::Upper("fisher.closed_form", 1e-9),
        Bound::Upper("fisher.form_pullback", 1e-9),
        Bound::Upper("fisher.form_antisymmetry", 1e-9),
        Bound::Lower("fisher.form_nondegenerate", 1e-13),
        Bound::Upper("fisher.structure_eigenvalues", 1e-9),
        Bound::Upper("fisher.structure_square", 1e-9),
        Bound::Lower("fisher.delta_exceeds_one_when_mixed", 1e-9),
        Bound::Upper("fisher.kahler_identity", 1e-9),
        Bound::Upper("fisher.scaling_identity", 1e-9),
    ];
    let rows = samples_over_dims(&dims, config.samples, |n, k| {
        let mut rng = sample_rng(config.seed, FISHER_STREAM + n as u64, k);
        let state = sample::random_positive_state(n, &mut rng, &tol);
        let point = random_point(&state, &mut rng);
        fisher_row(&state, &point, &mut rng).unwrap_or_else(|_| {
            let mut row = vec![f64::INFINITY; 10];
            row[4] = f64::NEG_INFINITY;
            row[7] = f64::NEG_INFINITY;
            row
        })
    });
    let mut report = reduce(&bounds, &rows, config);

    let mut pure_delta = Vec::new();
    let mut pure_square = Vec::new();
    let mut pure_fs = Vec::new();
    for n in pure_dims(config) {
        let state = pure_state(n);
        let mut rng = sample_rng(config.seed, FISHER_STREAM + 0x100 + n as u64, 0);
        for point in [
            OrbitPoint::reference(&state),
            random_point(&state, &mut rng),
        ] {
            match fisher_tensor(&point).and_then(|ft| fisher_structure_from_tensor(&state, &ft)) {
                Ok(fs) => {
                    pure_delta.push(fs.delta.iter().fold(0.0_f64, |a, d| a.max((d - 1.0).abs())));
                    let k = fs.j.nrows();
                    pure_square.push(max_abs_real(&(&fs.j * &fs.j + RealMatrix::identity(k, k))));
                }
                Err(_) => {
                    pure_delta.push(f64::INFINITY);
                    pure_square.push(f64::INFINITY);
                }
            }
        }
        let g = fisher_tensor(&OrbitPoint::reference(&state)).map(|ft| ft.g);
        pure_fs.push(match (g, kks::fubini_study_in_chart_frame(&state)) {
            (Ok(g), Ok(fs)) => {
                let (c, residual) = fit_proportionality(&g, &fs);
                if c > 0.0 {
                    residual
                } else {
                    f64::INFINITY
                }
            }
            _ => f64::INFINITY,
        });
    }
    report.push(CheckReport::max_residual(
        "fisher.pure_delta_identity",
        &pure_delta,
        config.threshold(1e-9),
    ));
    report.push(CheckReport::max_residual(
        "fisher.pure_complex_structure",
        &pure_square,
        config.threshold(1e-9),
    ));
    report.push(CheckReport::max_residual(
        "fisher.pure_fubini_study",
        &pure_fs,
        config.threshold(1e-9),
    ));

    let (anti, probes) = root_identity_probe(config);
    report.push(CheckReport::max_residual(
        "fisher.anticommutator_roots",
        &anti,
        config.threshold(1e-12),
    ));
    (report, probes)
}

fn fisher_row<R: Rng + ?Sized>(
    state: &LambdaState,
    point: &OrbitPoint,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let k = 2 * state.active_roots().len();
    let comps: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a = chart_tangent(point, &comps)?;
    let l = fisher::sld(point, &a, 1e-9)?;
    let sld_residual = (&anticommutator_unchecked(&l, point.rho()).scaled(0.5) - &a).max_abs();

    let ft = fisher_tensor(point)?;
    let closed = fisher_tensor_chart(state);
    let closed_residual = max_abs_real(&(&ft.f - &closed.f));

    let pullback = fisher::fisher_form_pullback_check(point, 1e-9)?;
    let value = |name: &str| {
        pullback
            .get(name)
            .map(|c| c.max_residual)
            .unwrap_or(f64::INFINITY)
    };
    let nondegenerate = pullback
        .get("fisher.form_nondegenerate")
        .and_then(|c| c.min_value)
        .unwrap_or(f64::NEG_INFINITY);

    let fs = fisher_structure_from_tensor(state, &ft)?;
    let ratios: Vec<f64> = state
        .active_roots()
        .iter()
        .map(|r| r.beta / r.alpha)
        .collect();
    let max_delta = fs.delta.iter().fold(1.0_f64, |a, &b| a.max(b));
    let eig = imaginary_pair_residual(&fs.j, &ratios);
    let square = rel(fs.square_residual, max_delta);
    let delta_gap = fs
        .delta
        .iter()
        .fold(f64::NEG_INFINITY, |a, d| a.max(d - 1.0));

    let kahler = rel(max_abs_real(&(&ft.g - &ft.w * &fs.j)), max_abs_real(&ft.g));
    let sqrt_delta = RealMatrix::from_diagonal(&DVector::from_iterator(
        fs.delta.len() * 2,
        fs.delta.iter().flat_map(|d| [d.sqrt(), d.sqrt()]),
    ));
    let lhs = fs.j.transpose() * &ft.g * &fs.j;
    let rhs = &sqrt_delta * &ft.g * &sqrt_delta;
    let scaling = rel(max_abs_real(&(lhs - &rhs)), max_abs_real(&rhs));

    Ok(vec![
        sld_residual,
        closed_residual,
        value("fisher.form_pullback"),
        value("fisher.form_antisymmetry"),
        nondegenerate,
        eig,
        square,
        delta_gap,
        kahler,
        scaling,
    ])
}

/// Root anticommutator identity on `n ∈ {2, 3}` plus the root-formula
/// probe on fixed example states.
fn root_identity_probe(config: &VerifyConfig) -> (Vec<f64>, Vec<RootIdentityProbe>) {
    let tol = Tolerances::default();
    let dims: Vec<usize> = (2..=3).filter(|n| config.dims().contains(n)).collect();
    let mut residuals = Vec::new();
    for &n in &dims {
        for k in 0..config.samples as u64 {
            let mut rng = sample_rng(config.seed, FISHER_STREAM + 0x200 + n as u64, k);
            let state = sample::random_positive_state(n, &mut rng, &tol);
            residuals.push(anticommutator_root_residual(&state));
        }
    }
    let mut probes = Vec::new();
    for example in [&[0.75, 0.25][..], &[0.5, 0.3, 0.2][..]] {
        if !dims.contains(&example.len()) {
            continue;
        }
        let state = LambdaState::new(example, &tol).expect("example state");
        residuals.push(anticommutator_root_residual(&state));
        for r in state.roots() {
            if let Ok(p) = eval_root_identity(&state, r.i, r.j) {
                probes.push(p);
            }
        }
    }
    (residuals, probes)
}

/// Checks for one fibration, as in the fibration suite.
pub fn fibration_pair_checks(
    fib: &OrbitFibration,
    config: &VerifyConfig,
    stream: u64,
) -> Result<CompatibilityReport> {
    fibration::check_all(
        fib,
        config.fibration_points,
        config.seed ^ stream,
        config.tol,
    )
}

fn merge_into(acc: &mut CompatibilityReport, other: CompatibilityReport) {
    for c in other.0 {
        match acc.0.iter_mut().find(|a| a.check == c.check) {
            Some(a) => *a = a.clone().merge(&c),
            None => acc.push(c),
        }
    }
}

pub fn fibration_suite(config: &VerifyConfig) -> Result<CompatibilityReport> {
    let tol = Tolerances::default();
    let dims: Vec<usize> = (config.min_n.max(3)..=config.max_n).collect();
    let count = config.fibration_pairs;
    let reports = sweep::map_indices(dims.len() * count, |k| {
        let n = dims[k / count];
        let stream = FIBRATION_STREAM + ((n as u64) << 8) + (k % count) as u64;
        let mut rng = sample_rng(config.seed, stream, 0);
        let (total, base) = sample::random_fibration_pair(n, &mut rng, &tol);
        let fib = fibration::fibration_new(total, base)?;
        fibration_pair_checks(&fib, config, stream)
    });
    let mut acc = CompatibilityReport::default();
    for r in reports {
        merge_into(&mut acc, r?);
    }
    Ok(acc)
}

/// Independent membership oracle: skew-adjoint, pairwise orthogonal nonzero
/// rows (complex form) or skew-symmetric with nonzero determinant (real form).
fn membership_oracle(m: &FisherForm) -> bool {
    match m {
        FisherForm::Complex(j) => {
            let n = j.nrows();
            let scale = max_abs(j).max(1.0);
            if max_abs(&(j + j.adjoint())) > 1e-10 * scale {
                return false;
            }
            for r in 0..n {
                if j.row(r).norm_squared() <= 1e-10 * scale * scale {
                    return false;
                }
                for c in r + 1..n {
                    let ip: Complex64 = j
                        .row(r)
                        .iter()
                        .zip(j.row(c).iter())
                        .map(|(a, b)| a * b.conj())
                        .sum();
                    if ip.norm() > 1e-10 * scale * scale {
                        return false;
                    }
                }
            }
            true
        }
        FisherForm::Real(j) => {
            let scale = max_abs_real(j).max(1.0);
            max_abs_real(&(j + j.transpose())) <= 1e-10 * scale
                && j.determinant().abs() > 1e-10 * scale.powi(j.nrows() as i32)
        }
    }
}

fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RealMatrix {
    RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
        .qr()
        .q()
}

fn random_root<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.2..3.0)
}

/// Direct sum of `i·d` and `[[0, −z̄], [z, 0]]` blocks, permuted and
/// conjugated by diagonal phases.
fn random_complex_structure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    let mut k = 0;
    while k < n {
        if k + 1 < n && rng.random_bool(0.5) {
            let z = Complex64::from_polar(
                random_root(rng),
                rng.random_range(0.0..std::f64::consts::TAU),
            );
            m[(k, k + 1)] = -z.conj();
            m[(k + 1, k)] = z;
            k += 2;
        } else {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            m[(k, k)] = Complex64::new(0.0, sign * random_root(rng));
            k += 1;
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let phases: Vec<Complex64> = (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    ComplexMatrix::from_fn(n, n, |r, c| {
        phases[r] * m[(perm[r], perm[c])] * phases[c].conj()
    })
}

fn random_real_structure<R: Rng + ?Sized>(
    planes: usize,
    rng: &mut R,
) -> (RealMatrix, RealMatrix, Vec<f64>) {
    let roots: Vec<f64> = (0..planes).map(|_| random_root(rng)).collect();
    let q = random_orthogonal(2 * planes, rng);
    (&q * block_diagonal(&roots) * q.transpose(), q, roots)
}

fn constructed_case<R: Rng + ?Sized>(k: u64, rng: &mut R) -> (FisherForm, bool) {
    let n = rng.random_range(1..=6);
    match k % 4 {
        0 => (FisherForm::Complex(random_complex_structure(n, rng)), true),
        1 => {
            let base = random_complex_structure(n.max(2), rng);
            let broken = match rng.random_range(0..3) {
                // Hermitian part
                0 => {
                    let h = sample::random_hermitian(base.nrows(), rng);
                    base + h.matrix() * Complex64::new(0.5, 0.0)
                }
                // generic skew-adjoint: rows not orthogonal
                1 => {
                    let h = sample::random_hermitian(base.nrows(), rng);
                    h.matrix() * Complex64::new(0.0, 1.0)
                }
                // vanishing row and column
                _ => {
                    let mut m = base;
                    let r = rng.random_range(0..m.nrows());
                    m.row_mut(r).fill(Complex64::default());
                    m.column_mut(r).fill(Complex64::default());
                    m
                }
            };
            (FisherForm::Complex(broken), false)
        }
        2 => (FisherForm::Real(random_real_structure(n, rng).0), true),
        _ => {
            let broken = match rng.random_range(0..3) {
                0 => {
                    let (j, _, _) = random_real_structure(n, rng);
                    let s = RealMatrix::from_fn(2 * n, 2 * n, |_, _| rng.random_range(-1.0..1.0));
                    j + (&s + s.transpose()) * 0.25
                }
                1 => {
                    let mut roots: Vec<f64> = (0..n).map(|_| random_root(rng)).collect();
                    roots[0] = 0.0;
                    let q = random_orthogonal(2 * n, rng);
                    &q * block_diagonal(&roots) * q.transpose()
                }
                _ => {
                    let a = RealMatrix::from_fn(2 * n + 1, 2 * n + 1, |_, _| {
                        rng.random_range(-1.0..1.0)
                    });
                    &a - a.transpose()
                }
            };
            (FisherForm::Real(broken), false)
        }
    }
}

pub fn linfisher_suite(config: &VerifyConfig) -> CompatibilityReport {
    let tol = Tolerances::default();
    let seed = config.seed;
    let membership = sweep::map_indices(2 * config.samples, |k| {
        let mut rng = sample_rng(seed, LINFISHER_STREAM, k as u64);
        let (m, label) = constructed_case(k as u64, &mut rng);
        let diag = is_fisher_structure(&m, tol.verification);
        let oracle = membership_oracle(&m);
        diag.is_fisher == oracle && oracle == label
    });

    let rows = sweep::map_indices(config.samples, |k| {
        let mut rng = sample_rng(seed, LINFISHER_STREAM + 1, k as u64);
        let planes = rng.random_range(1..=4);
        let mut roots: Vec<f64> = (0..planes).map(|_| random_root(&mut rng)).collect();
        if planes > 1 && rng.random_bool(0.5) {
            roots[1] = roots[0];
        }
        let frame = random_orthogonal(2 * planes, &mut rng);
        let j = &frame * block_diagonal(&roots) * frame.transpose();
        let form = FisherForm::Real(j.clone());

        let normal = normal_form(&form, &tol)
            .map(|nf| rel(nf.residual, max_abs_real(&j)))
            .unwrap_or(f64::INFINITY);

        let q1: Vec<f64> = (0..planes).map(|_| rng.random_range(0.1..4.0)).collect();
        let q2: Vec<f64> = (0..planes).map(|_| rng.random_range(0.1..4.0)).collect();
        let q12: Vec<f64> = q1.iter().zip(&q2).map(|(a, b)| a * b).collect();
        let group = (|| -> Result<(f64, f64, f64)> {
            let inner = scaling_action(&q2, &form, Some(&frame), &tol)?;
            let outer = scaling_action(&q1, &inner.repr, Some(&frame), &tol)?;
            let direct = scaling_action(&q12, &form, Some(&frame), &tol)?;
            let ident = scaling_action(&vec![1.0; planes], &form, Some(&frame), &tol)?;
            let d = direct.repr.realify();
            let composition = rel(max_abs_real(&(outer.repr.realify() - &d)), max_abs_real(&d));
            let identity = rel(max_abs_real(&(ident.repr.realify() - &j)), max_abs_real(&j));
            let base = LinearFisherStructure {
                repr: form.clone(),
                roots: plane_roots(&j, &frame, tol.verification)?,
            };
            let recovered = scale_between(&base, &direct)?;
            let transitive = recovered
                .iter()
                .zip(&q12)
                .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs() / y.max(1.0)));
            Ok((composition, identity, transitive))
        })()
        .unwrap_or((f64::INFINITY, f64::INFINITY, f64::INFINITY));

        let n = rng.random_range(1..=6);
        let unitary =
            unitary_intersection(&random_complex_structure(n, &mut rng), tol.verification)
                .map(|u| u.residual)
                .unwrap_or(f64::INFINITY);

        // a path of conjugates keeps its roots
        let path: Vec<FisherForm> = (0..5)
            .map(|_| {
                let g = random_orthogonal(2 * planes, &mut rng);
                FisherForm::Real(&g * &j * g.transpose())
            })
            .collect();
        let manifold = if manifold_fisher_check(&path, &tol).pass {
            0.0
        } else {
            f64::INFINITY
        };

        vec![normal, group.0, group.1, group.2, unitary, manifold]
    });
    let bounds = [
        Bound::Upper("linfisher.normal_form_reconstruction", 1e-10),
        Bound::Upper("linfisher.scaling_composition", 1e-12),
        Bound::Upper("linfisher.scaling_identity", 1e-12),
        Bound::Upper("linfisher.scaling_free_transitive", 1e-12),
        Bound::Upper("linfisher.unitary_intersection", 1e-10),
        Bound::Upper("linfisher.manifold_constant_roots", 0.0),
    ];
    let mut report = CompatibilityReport::default();
    report.push(CheckReport::all_true(
        "linfisher.membership_oracle",
        &membership,
    ));
    report.extend(reduce(&bounds, &rows, config));
    report
}
