//! Dense complex linear algebra: matrix exponential and log-determinants.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Pivots with modulus below this abort the factorization.
pub const SINGULAR_PIVOT: f64 = 1e-13;

/// A row swap is only taken when the diagonal candidate is this much smaller
/// than the column maximum; this keeps the pivot sequence (and hence the
/// accumulated argument) continuous for diagonally dominant inputs.
const SWAP_THRESHOLD: f64 = 1e-3;

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Maximum absolute column sum.
pub fn norm_1(a: &CMat) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Sum of the first `n` diagonal entries.
pub fn partial_trace(a: &CMat, n: usize) -> Complex64 {
    (0..n.min(a.nrows())).map(|i| a[(i, i)]).sum()
}

pub fn corner(a: &CMat, n: usize) -> CMat {
    a.view((0, 0), (n, n)).into_owned()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `e^A` by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = norm_1(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / Complex64::from(2f64.powi(s));
    let b = PADE_13.map(Complex64::from);
    let id = identity(n);

    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is invertible for scaled arguments");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// `log det A` with the imaginary part accumulated from the pivot arguments.
///
/// Elimination keeps the natural order unless a diagonal entry falls below
/// [`SWAP_THRESHOLD`] times its column maximum. Each swap contributes `iπ`.
pub fn log_det(a: &CMat) -> Result<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "log_det needs a square matrix");
    let mut m = a.clone();
    let mut log_abs = 0.0;
    let mut arg = 0.0;
    for k in 0..n {
        let (imax, vmax) = (k..n)
            .map(|i| (i, m[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if m[(k, k)].norm() < SWAP_THRESHOLD * vmax {
            m.swap_rows(k, imax);
            arg += std::f64::consts::PI;
        }
        let pivot = m[(k, k)];
        if pivot.norm() < SINGULAR_PIVOT {
            return Err(Error::Singular {
                step: k,
                modulus: pivot.norm(),
            });
        }
        log_abs += pivot.norm().ln();
        arg += pivot.arg();
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let t = m[(k, j)];
                m[(i, j)] -= f * t;
            }
        }
    }
    Ok(Complex64::new(log_abs, arg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, scale: f64, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
        })
    }

    fn taylor_exp(a: &CMat) -> CMat {
        let n = a.nrows();
        let mut term = identity(n);
        let mut sum = identity(n);
        for k in 1..60 {
            term = &term * a / Complex64::from(k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn expm_matches_taylor_for_small_norms() {
        for seed in 0..4 {
            let a = random(12, 0.3, seed);
            let diff = max_abs(&(expm(&a) - taylor_exp(&a)));
            assert!(diff < 1e-13, "seed {seed}: {diff}");
        }
    }

    #[test]
    fn expm_with_squaring() {
        // exp(A) exp(-A) = I also after several squarings
        let a = random(10, 3.0, 9);
        let prod = expm(&a) * expm(&(-&a));
        assert!(max_abs(&(prod - identity(10))) < 1e-9);
    }

    #[test]
    fn expm_of_diagonal() {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.5, 1.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(7.0, -3.0),
        ]));
        let e = expm(&d);
        for i in 0..3 {
            let rel = (e[(i, i)] - d[(i, i)].exp()).norm() / d[(i, i)].exp().norm();
            assert!(rel < 1e-13);
        }
    }

    #[test]
    fn log_det_agrees_with_nalgebra() {
        for seed in 0..5 {
            let a = random(9, 1.0, 100 + seed);
            let ld = log_det(&a).unwrap();
            let det = a.clone().determinant();
            assert!((ld.exp() - det).norm() <= 1e-12 * det.norm().max(1.0));
        }
    }

    #[test]
    fn log_det_tracks_argument_continuously() {
        // det of diag(e^{iθ}) for 8 entries of θ = 0.7: argument 5.6 > π
        let n = 8;
        let a = CMat::from_diagonal_element(n, n, Complex64::cis(0.7));
        let ld = log_det(&a).unwrap();
        assert!((ld.im - 5.6).abs() < 1e-13);
        assert!(ld.re.abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = random(5, 1.0, 1);
        for j in 0..5 {
            let v = a[(0, j)];
            a[(3, j)] = v;
        }
        assert!(matches!(log_det(&a), Err(Error::Singular { .. })));
    }

    #[test]
    fn permuted_identity() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = Complex64::from(1.0);
        a[(1, 0)] = Complex64::from(1.0);
        let ld = log_det(&a).unwrap();
        assert!((ld.exp() + 1.0).norm() < 1e-15);
    }
}
