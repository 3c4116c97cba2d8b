//! Random inputs for property checks and verification sweeps.
//!
//! Every sweep derives one RNG per sample from `(seed, stream, index)`, so
//! results do not depend on the order in which samples are evaluated.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::herm::{ComplexMatrix, HermitianMatrix};
use crate::orbit::{ChartVector, LambdaState};
use crate::tol::Tolerances;

/// RNG for sample `index` of stream `stream` under the user seed.
pub fn sample_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut x = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = splitmix(x ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    ChaCha8Rng::seed_from_u64(x)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE up to scale).
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    HermitianMatrix::symmetrize(g)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` divided out.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Block-diagonal Haar unitary over the degeneracy blocks of `state`: a
/// random element of its stabilizer group.
pub fn random_stabilizer_unitary<R: Rng + ?Sized>(
    state: &LambdaState,
    rng: &mut R,
) -> ComplexMatrix {
    let n = state.n();
    let mut u = ComplexMatrix::zeros(n, n);
    for b in state.blocks() {
        let block = random_unitary(b.len(), rng);
        u.view_mut((b.start, b.start), (b.len(), b.len()))
            .copy_from(&block);
    }
    u
}

/// Dirichlet(1) spectrum, sorted descending, with every eigenvalue at least
/// `min_value` and consecutive gaps at least `min_gap`.
pub fn random_spectrum<R: Rng + ?Sized>(
    n: usize,
    min_value: f64,
    min_gap: f64,
    rng: &mut R,
) -> Vec<f64> {
    loop {
        let mut w: Vec<f64> = (0..n)
            .map(|_| -rng.random::<f64>().max(1e-300).ln())
            .collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w.sort_by(|a, b| b.total_cmp(a));
        let ok_min = w.last().is_some_and(|&x| x >= min_value);
        let ok_gap = w.windows(2).all(|p| p[0] - p[1] >= min_gap);
        if ok_min && ok_gap {
            return renormalize(w);
        }
    }
}

/// Strictly positive state with well-separated eigenvalues.
pub fn random_positive_state<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> LambdaState {
    let min_gap = 0.02 / n as f64;
    let lambda = random_spectrum(n, 0.01 / n as f64, min_gap, rng);
    LambdaState::new(&lambda, tol).expect("sampled spectrum is valid")
}

/// State whose spectrum may contain repeated and zero eigenvalues.
pub fn random_degenerate_state<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> LambdaState {
    let blocks = random_composition(n, rng);
    let zero_tail = rng.random_bool(0.3) && blocks.len() > 1;
    let k = blocks.len();
    let values = random_spectrum(k, 0.02 / k as f64, 0.02 / k as f64, rng);
    let mut lambda = Vec::with_capacity(n);
    for (b, &size) in blocks.iter().enumerate() {
        let v = if zero_tail && b == k - 1 {
            0.0
        } else {
            values[b]
        };
        lambda.extend(std::iter::repeat_n(v, size));
    }
    LambdaState::new(&renormalize(lambda), tol).expect("sampled spectrum is valid")
}

/// Random ordered composition of `n` into positive parts.
pub fn random_composition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut current = 1;
    for _ in 1..n {
        if rng.random_bool(0.5) {
            parts.push(current);
            current = 1;
        } else {
            current += 1;
        }
    }
    parts.push(current);
    parts
}

/// Chart coordinates with entries uniform in `[-scale, scale]`.
pub fn random_chart<R: Rng + ?Sized>(state: &LambdaState, scale: f64, rng: &mut R) -> ChartVector {
    let coords = (0..state.active_roots().len())
        .map(|_| {
            [
                rng.random_range(-scale..=scale),
                rng.random_range(-scale..=scale),
            ]
        })
        .collect();
    ChartVector { coords }
}

/// Descending, sum-one pair `(total, base)` where the base partition coarsens
/// the total partition.
pub fn random_fibration_pair<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> (LambdaState, LambdaState) {
    loop {
        let base_blocks = random_composition(n, rng);
        // total: refine each base block, then assign strictly descending values
        let mut total_blocks = Vec::new();
        for &b in &base_blocks {
            total_blocks.extend(random_composition(b, rng));
        }
        let t = total_blocks.len();
        let k = base_blocks.len();
        let tv = random_spectrum(t, 0.02 / t as f64, 0.02 / t as f64, rng);
        let bv = random_spectrum(k, 0.02 / k as f64, 0.02 / k as f64, rng);
        let total = expand(&total_blocks, &tv);
        let base = expand(&base_blocks, &bv);
        if let (Ok(a), Ok(b)) = (LambdaState::new(&total, tol), LambdaState::new(&base, tol)) {
            if a.blocks().len() == t && b.blocks().len() == k {
                return (a, b);
            }
        }
    }
}

fn expand(blocks: &[usize], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for (&size, &v) in blocks.iter().zip(values) {
        out.extend(std::iter::repeat_n(v, size));
    }
    renormalize(out)
}

fn renormalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}
