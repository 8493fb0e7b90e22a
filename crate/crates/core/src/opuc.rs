//! Orthogonal polynomials on the unit circle.
//!
//! Conventions: `⟨f, g⟩ = ∫ f ḡ dμ`, `c_k = ∫ z^{-k} dμ`, and
//! `Φ_{n+1}(z) = z Φ_n(z) − ᾱ_n Φ*_n(z)`.

use std::path::Path;

use num_complex::Complex64;

use crate::cmv;
use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::linalg::{self, CMat};
use crate::measure::{CircleMeasure, Quadrature};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Recursion aborts once a coefficient reaches this modulus.
pub const POSITIVITY_LIMIT: f64 = 1.0 - 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct VerblunskySeq {
    pub alphas: Vec<Complex64>,
    /// Total mass `c_0` of the generating measure.
    pub mass: f64,
}

impl VerblunskySeq {
    pub fn new(alphas: Vec<Complex64>, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        if let Some((j, a)) = alphas.iter().enumerate().find(|(_, a)| !(a.norm() < 1.0)) {
            return Err(Error::PositivityLoss {
                index: j,
                modulus: a.norm(),
            });
        }
        Ok(Self { alphas, mass })
    }

    /// Probability measure with `α_j = f(j)` for `j < n`.
    pub fn from_fn(n: usize, f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        Self::new((0..n).map(f).collect(), 1.0)
    }

    pub fn constant(alpha: Complex64, n: usize) -> Result<Self> {
        Self::from_fn(n, |_| alpha)
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn rho(&self, j: usize) -> f64 {
        (1.0 - self.alphas[j].norm_sqr()).sqrt()
    }

    /// Same coefficients followed by zeros up to length `n`.
    pub fn padded(&self, n: usize) -> Self {
        let mut alphas = self.alphas.clone();
        alphas.resize(n.max(alphas.len()), ZERO);
        Self {
            alphas,
            mass: self.mass,
        }
    }

    pub fn truncated(&self, n: usize) -> Self {
        Self {
            alphas: self.alphas[..n.min(self.len())].to_vec(),
            mass: self.mass,
        }
    }

    /// `‖Φ_j‖²` for `j = 0..=len`.
    pub fn norms_sq(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut cur = self.mass;
        out.push(cur);
        for a in &self.alphas {
            cur *= 1.0 - a.norm_sqr();
            out.push(cur);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(["j", "re", "im"])?;
        for (j, a) in self.alphas.iter().enumerate() {
            w.write_record([j.to_string(), format!("{:.17e}", a.re), format!("{:.17e}", a.im)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `(j, re α_j, im α_j)` rows; the mass is taken to be 1.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let mut rows: Vec<(usize, Complex64)> = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let field = |i: usize| -> Result<&str> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse(format!("row {:?} needs three columns", rec)))
            };
            let j: usize = field(0)?
                .parse()
                .map_err(|e| Error::Parse(format!("bad index: {e}")))?;
            let re: f64 = field(1)?
                .parse()
                .map_err(|e| Error::Parse(format!("bad real part: {e}")))?;
            let im: f64 = field(2)?
                .parse()
                .map_err(|e| Error::Parse(format!("bad imaginary part: {e}")))?;
            rows.push((j, Complex64::new(re, im)));
        }
        rows.sort_by_key(|r| r.0);
        if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
            return Err(Error::Parse("indices must be 0, 1, 2, ... without gaps".into()));
        }
        Self::new(rows.into_iter().map(|r| r.1).collect(), 1.0)
    }
}

/// Monic `Φ_n`, its reversal `Φ*_n`, and the norms `‖Φ_j‖²`, `j ≤ n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpucState {
    /// Ascending coefficients of `Φ_n`.
    pub phi: Vec<Complex64>,
    /// Ascending coefficients of `Φ*_n`.
    pub phi_star: Vec<Complex64>,
    pub norms_sq: Vec<f64>,
}

impl OpucState {
    pub fn from_verblunsky(v: &VerblunskySeq, n: usize) -> Result<Self> {
        if n > v.len() {
            return Err(Error::Range(format!(
                "degree {n} needs {n} Verblunsky coefficients, have {}",
                v.len()
            )));
        }
        let mut phi = vec![ONE];
        let mut phi_star = vec![ONE];
        for &a in &v.alphas[..n] {
            let (p, ps) = szego_step(&phi, &phi_star, a);
            phi = p;
            phi_star = ps;
        }
        let mut norms_sq = v.norms_sq();
        norms_sq.truncate(n + 1);
        Ok(Self {
            phi,
            phi_star,
            norms_sq,
        })
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.phi.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn eval_star(&self, z: Complex64) -> Complex64 {
        self.phi_star.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }
}

/// One step of the recursion in coefficient form.
fn szego_step(
    phi: &[Complex64],
    phi_star: &[Complex64],
    alpha: Complex64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = phi.len();
    let mut next = vec![ZERO; n + 1];
    let mut next_star = vec![ZERO; n + 1];
    for j in 0..n {
        // z Φ_n
        next[j + 1] += phi[j];
        next_star[j + 1] -= alpha * phi[j];
        next[j] -= alpha.conj() * phi_star[j];
        next_star[j] += phi_star[j];
    }
    (next, next_star)
}

/// Levinson recursion: `α_0..α_{N−1}` from `c_0..c_N`.
///
/// For arc-supported measures the map from moments to coefficients amplifies
/// perturbations by a roughly constant factor per index, so coefficients past
/// the first couple of dozen are only as good as the moments allow. Use
/// [`verblunsky_from_measure`] when a quadrature is available.
pub fn szego_from_moments(c: &[Complex64]) -> Result<VerblunskySeq> {
    if c.is_empty() || !(c[0].re > 0.0) {
        return Err(Error::Domain("moment c_0 must be positive".into()));
    }
    let n_total = c.len() - 1;
    let mut phi = vec![ONE];
    let mut phi_star = vec![ONE];
    let mut norm = c[0].re;
    let mut alphas = Vec::with_capacity(n_total);
    for n in 0..n_total {
        // ⟨z Φ_n, 1⟩ = Σ_j φ_j ∫ z^{j+1} dμ = Σ_j φ_j conj(c_{j+1})
        let inner: Complex64 = phi
            .iter()
            .enumerate()
            .map(|(j, &p)| p * c[j + 1].conj())
            .sum();
        let alpha = (inner / norm).conj();
        if alpha.norm() >= POSITIVITY_LIMIT {
            return Err(Error::PositivityLoss {
                index: n,
                modulus: alpha.norm(),
            });
        }
        alphas.push(alpha);
        let (p, ps) = szego_step(&phi, &phi_star, alpha);
        phi = p;
        phi_star = ps;
        norm *= 1.0 - alpha.norm_sqr();
    }
    VerblunskySeq::new(alphas, c[0].re)
}

/// Orthonormal polynomials sampled on quadrature nodes, `u_j[m] = φ_j(z_m) √w_m`.
#[derive(Clone, Debug)]
pub struct NodeBasis {
    pub z: Vec<Complex64>,
    pub phi: Vec<Vec<Complex64>>,
    pub verblunsky: VerblunskySeq,
}

fn vdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Coefficient of `b` along `z·a`: `Σ conj(z_m a_m) b_m`.
fn vdot_zc(a: &[Complex64], z: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(z)
        .zip(b)
        .map(|((x, zm), y)| (zm * x).conj() * y)
        .sum()
}

fn normalize(u: &mut [Complex64]) -> f64 {
    let nrm = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in u.iter_mut() {
        *x /= nrm;
    }
    nrm
}

/// Runs the recursion on the discretized measure, re-orthogonalizing each
/// new `φ_{j+1}` against `φ_0..φ_j` and `φ*_{j+1}` against `zφ_0..zφ_j`.
///
/// Returns `φ_0..φ_n` on the nodes and `α_0..α_{n−1}`.
pub fn node_basis(quad: &Quadrature, n: usize) -> Result<NodeBasis> {
    let z = quad.z();
    let mass = quad.mass();
    if !(mass > 0.0) {
        return Err(Error::Domain("measure has no mass".into()));
    }
    let sqrt_w: Vec<f64> = quad.weight.iter().map(|w| w.max(0.0).sqrt()).collect();
    let mut u: Vec<Complex64> = sqrt_w.iter().map(|&s| Complex64::from(s / mass.sqrt())).collect();
    let mut u_star = u.clone();
    let mut basis = vec![u.clone()];
    let mut alphas = Vec::with_capacity(n);
    let mut zu = vec![ZERO; z.len()];
    for j in 0..n {
        for ((o, zm), x) in zu.iter_mut().zip(&z).zip(&u) {
            *o = zm * x;
        }
        let alpha = vdot(&u_star, &zu).conj();
        if alpha.norm() >= POSITIVITY_LIMIT {
            return Err(Error::PositivityLoss {
                index: j,
                modulus: alpha.norm(),
            });
        }
        alphas.push(alpha);
        let rho = (1.0 - alpha.norm_sqr()).sqrt();
        let mut next: Vec<Complex64> = zu
            .iter()
            .zip(&u_star)
            .map(|(a, b)| (a - alpha.conj() * b) / rho)
            .collect();
        let mut next_star: Vec<Complex64> = u_star
            .iter()
            .zip(&zu)
            .map(|(b, a)| (b - alpha * a) / rho)
            .collect();
        for prev in &basis {
            let c = vdot(prev, &next);
            for (x, p) in next.iter_mut().zip(prev) {
                *x -= c * p;
            }
            let c = vdot_zc(prev, &z, &next_star);
            for ((y, zm), p) in next_star.iter_mut().zip(&z).zip(prev) {
                *y -= c * zm * p;
            }
        }
        normalize(&mut next);
        normalize(&mut next_star);
        basis.push(next.clone());
        u = next;
        u_star = next_star;
    }
    Ok(NodeBasis {
        z,
        phi: basis,
        verblunsky: VerblunskySeq::new(alphas, mass)?,
    })
}

/// `α_0..α_{n−1}` of `μ` from its quadrature by the re-orthogonalized recursion.
pub fn verblunsky_from_measure(mu: &CircleMeasure, n: usize) -> Result<VerblunskySeq> {
    Ok(node_basis(&mu.quadrature(), n)?.verblunsky)
}

/// Gauss–Szegő rule of `v`: the discrete measure with Verblunsky coefficients
/// `α_0..α_{N−1}` followed by the unimodular `beta`.
///
/// Nodes are the eigenvalues of the unitary `(N+1) × (N+1)` CMV matrix, weights
/// `c_0 |⟨e_0, x_k⟩|²` from its eigenvectors. The rule reproduces the moments
/// `c_0..c_N` of every measure sharing those coefficients.
pub fn paraorthogonal_quadrature(v: &VerblunskySeq, beta: Complex64) -> Result<Quadrature> {
    if (beta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("|beta| = {} is not 1", beta.norm())));
    }
    let n = v.len();
    let a = |k: i64| -> Result<Complex64> {
        Ok(match k {
            -1 => Complex64::new(-1.0, 0.0),
            k if (k as usize) < n => v.alphas[k as usize],
            _ => beta,
        })
    };
    let c = cmv::cmv_window(&a, 0, n + 1, 0)?;
    let (q, t) = c.schur().unpack();
    let mut theta = Vec::with_capacity(n + 1);
    let mut weight = Vec::with_capacity(n + 1);
    for k in 0..=n {
        theta.push(t[(k, k)].arg().rem_euclid(2.0 * std::f64::consts::PI));
        weight.push(v.mass * q[(0, k)].norm_sqr());
    }
    Ok(Quadrature { theta, weight })
}

/// `log D_n = Σ_{j<n} log ‖Φ_j‖²`.
pub fn log_toeplitz_det(v: &VerblunskySeq, n: usize) -> Result<f64> {
    if n > v.len() {
        return Err(Error::Range(format!(
            "log det of order {n} needs {n} coefficients, have {}",
            v.len()
        )));
    }
    let mut log_norm = v.mass.ln();
    let mut sum = 0.0;
    for j in 0..n {
        sum += log_norm;
        log_norm += (1.0 - v.alphas[j].norm_sqr()).ln();
    }
    Ok(sum)
}

/// `log[D_n(e^h dμ) / D_n(dμ)]` for each `n` in `ns`.
///
/// Real `h` compares the two Verblunsky sequences. Complex `h` factors the
/// Gram matrix `⟨e^h φ_k, φ_j⟩_μ` of the first `n` orthonormal polynomials,
/// whose determinant is the same ratio.
pub fn log_det_ratio_sweep(mu: &CircleMeasure, h: &TrigPoly, ns: &[usize]) -> Result<Vec<Complex64>> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    if n_max == 0 {
        return Ok(vec![ZERO; ns.len()]);
    }
    if h.is_real_symbol(1e-14) {
        let nu = mu.exp_perturb(h)?;
        let a = verblunsky_from_measure(&nu, n_max)?;
        let b = verblunsky_from_measure(mu, n_max)?;
        ns.iter()
            .map(|&n| Ok(Complex64::from(log_toeplitz_det(&a, n)? - log_toeplitz_det(&b, n)?)))
            .collect()
    } else {
        let basis = node_basis(&mu.quadrature(), n_max - 1)?;
        let eh: Vec<Complex64> = mu
            .quadrature()
            .theta
            .iter()
            .map(|&t| h.eval_angle(t).exp())
            .collect();
        let gram = CMat::from_fn(n_max, n_max, |j, k| {
            basis.phi[k]
                .iter()
                .zip(&basis.phi[j])
                .zip(&eh)
                .map(|((a, b), e)| e * a * b.conj())
                .sum()
        });
        ns.iter()
            .map(|&n| linalg::log_det(&linalg::corner(&gram, n)))
            .collect()
    }
}

pub fn log_det_ratio(mu: &CircleMeasure, h: &TrigPoly, n: usize) -> Result<Complex64> {
    Ok(log_det_ratio_sweep(mu, h, &[n])?[0])
}

/// `Tr P_n h(C) P_n = ∫ h K_n dμ`, read off a CMV truncation.
pub fn kernel_diag_trace(v: &VerblunskySeq, h: &TrigPoly, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Ok(ZERO);
    }
    let t = n + 2 * h.effective_degree() + 2;
    let c = cmv::build_cmv(&v.padded(t), t)?;
    let hc = cmv::h_of_cmv(&c, h)?;
    Ok(linalg::partial_trace(&hc, n))
}

pub fn kernel_diag_trace_measure(mu: &CircleMeasure, h: &TrigPoly, n: usize) -> Result<Complex64> {
    let t = n + 2 * h.effective_degree() + 2;
    let v = verblunsky_from_measure(mu, t)?;
    kernel_diag_trace(&v, h, n)
}

/// `Σ_m w_m h(z_m) Σ_{j<n} |φ_j(z_m)|²` on the nodes of `basis`.
pub fn kernel_diag_trace_quadrature(basis: &NodeBasis, theta: &[f64], h: &TrigPoly, n: usize) -> Complex64 {
    theta
        .iter()
        .enumerate()
        .map(|(m, &t)| {
            let k: f64 = basis.phi[..n].iter().map(|u| u[m].norm_sqr()).sum();
            h.eval_angle(t) * k
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::FhSingularity;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_seq(rng: &mut impl Rng, n: usize, r: f64) -> VerblunskySeq {
        VerblunskySeq::from_fn(n, |_| {
            Complex64::from_polar(r * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>())
        })
        .unwrap()
    }

    fn dense_log_det(c: &[Complex64], n: usize) -> f64 {
        // T_{jk} = c_{k−j}
        let t = CMat::from_fn(n, n, |j, k| {
            if k >= j {
                c[k - j]
            } else {
                c[j - k].conj()
            }
        });
        t.determinant().re.ln()
    }

    #[test]
    fn lebesgue_moments_give_zero_coefficients() {
        let m = CircleMeasure::lebesgue().moments(10).unwrap();
        let v = szego_from_moments(&m).unwrap();
        assert!(v.alphas.iter().all(|a| a.norm() < 1e-10));
        let v = verblunsky_from_measure(&CircleMeasure::lebesgue(), 40).unwrap();
        assert!(v.alphas.iter().all(|a| a.norm() < 1e-10));
    }

    #[test]
    fn levinson_on_cmv_moments_of_constant_sequence() {
        let v = VerblunskySeq::constant(c(0.5), 80).unwrap();
        let m = cmv::moments_from_verblunsky(&v, 32).unwrap();
        let got = szego_from_moments(&m).unwrap();
        // rounding in c_k is amplified about threefold per index
        for (j, a) in got.alphas.iter().enumerate() {
            let tol = if j < 19 { 1e-8 } else { 1e-16 * 3f64.powi(j as i32 + 1) };
            assert!((a - 0.5).norm() < tol, "j = {j}: {a}");
        }
    }

    #[test]
    fn levinson_round_trip_for_one_plus_z_squared() {
        // |1+z|² dθ/2π has c_0 = 2, c_{±1} = 1
        let mut m = vec![c(2.0), c(1.0)];
        m.resize(21, c(0.0));
        let v = szego_from_moments(&m).unwrap();
        let back = cmv::moments_from_verblunsky(&v, 20).unwrap();
        for k in 0..=20 {
            assert!((back[k] - m[k]).norm() < 1e-9, "k = {k}");
        }
    }

    #[test]
    fn moments_round_trip_through_cmv() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let v = random_seq(&mut rng, 24, 0.6);
        let m = cmv::moments_from_verblunsky(&v, 24).unwrap();
        let back = szego_from_moments(&m).unwrap();
        for j in 0..24 {
            assert!((back.alphas[j] - v.alphas[j]).norm() < 1e-8);
        }
    }

    #[test]
    fn positivity_loss_names_the_index() {
        // c_1 = 1 = c_0 forces |α_0| = 1
        let err = szego_from_moments(&[c(1.0), c(1.0)]).unwrap_err();
        assert!(matches!(err, Error::PositivityLoss { index: 0, .. }));
    }

    #[test]
    fn log_det_examples() {
        let leb = VerblunskySeq::constant(c(0.0), 10).unwrap();
        assert_eq!(log_toeplitz_det(&leb, 10).unwrap(), 0.0);
        let g = VerblunskySeq::constant(c(0.5), 10).unwrap();
        assert!((log_toeplitz_det(&g, 3).unwrap() - 0.421_875f64.ln()).abs() < 1e-15);
        assert!(matches!(log_toeplitz_det(&g, 11), Err(Error::Range(_))));
    }

    #[test]
    fn log_det_matches_dense_toeplitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = random_seq(&mut rng, 8, 0.7);
        let m = cmv::moments_from_verblunsky(&v, 8).unwrap();
        let expect = dense_log_det(&m, 8);
        assert!((log_toeplitz_det(&v, 8).unwrap() - expect).abs() < 1e-8);
    }

    #[test]
    fn state_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_seq(&mut rng, 6, 0.8);
        let s = OpucState::from_verblunsky(&v, 6).unwrap();
        assert_eq!(s.phi[6], ONE);
        for j in 0..=6 {
            assert!((s.phi_star[j] - s.phi[6 - j].conj()).norm() < 1e-14);
        }
        for j in 0..6 {
            let ratio = s.norms_sq[j + 1] / s.norms_sq[j];
            assert!((ratio - (1.0 - v.alphas[j].norm_sqr())).abs() < 1e-10);
        }
    }

    fn catalog() -> Vec<CircleMeasure> {
        vec![
            CircleMeasure::lebesgue(),
            CircleMeasure::lebesgue().with_atom(0.0, 0.5).unwrap(),
            CircleMeasure::geronimus(c(0.5)).unwrap(),
            CircleMeasure::geronimus(c(0.6)).unwrap(),
            CircleMeasure::geronimus(Complex64::new(0.0, 0.5)).unwrap(),
            CircleMeasure::fisher_hartwig(vec![FhSingularity {
                theta: PI,
                alpha: 1.0,
                beta: 0.0,
            }])
            .unwrap(),
        ]
    }

    #[test]
    fn orthogonality_on_the_catalog() {
        for mu in catalog() {
            let quad = mu.quadrature();
            let v = verblunsky_from_measure(&mu, 16).unwrap();
            for n in [1, 4, 9, 16] {
                let s = OpucState::from_verblunsky(&v, n).unwrap();
                for k in 0..n {
                    let ip = quad.integrate(|t| {
                        let z = Complex64::cis(t);
                        s.eval(z) * z.powi(-(k as i32))
                    });
                    assert!(ip.norm() <= 1e-8 * s.norms_sq[n], "n = {n}, k = {k}: {ip}");
                }
                let nrm = quad.integrate(|t| Complex64::from(s.eval(Complex64::cis(t)).norm_sqr()));
                assert!((nrm.re - s.norms_sq[n]).abs() <= 1e-10 * s.norms_sq[0]);
            }
        }
    }

    #[test]
    fn node_basis_matches_levinson_on_benign_measures() {
        let mu = CircleMeasure::fisher_hartwig(vec![FhSingularity {
            theta: PI,
            alpha: 1.0,
            beta: 0.0,
        }])
        .unwrap();
        let a = szego_from_moments(&mu.moments(12).unwrap()).unwrap();
        let b = verblunsky_from_measure(&mu, 12).unwrap();
        assert!((a.mass - b.mass).abs() < 1e-12);
        for j in 0..12 {
            assert!((a.alphas[j] - b.alphas[j]).norm() < 1e-10);
        }
    }

    #[test]
    fn geronimus_recovery() {
        for a in [
            c(0.0),
            c(0.3),
            c(-0.3),
            Complex64::new(0.0, 0.5),
            c(0.6),
            Complex64::new(-0.4, 0.2),
        ] {
            let v = verblunsky_from_measure(&CircleMeasure::geronimus(a).unwrap(), 32).unwrap();
            let err = v.alphas.iter().map(|x| (x - a).norm()).fold(0.0, f64::max);
            assert!(err <= 1e-6, "alpha = {a}: {err}");
        }
    }

    #[test]
    fn log_det_ratio_trivial_cases() {
        let mu = CircleMeasure::geronimus(c(0.3)).unwrap();
        assert!(log_det_ratio(&mu, &TrigPoly::zero(1), 8).unwrap().norm() < 1e-10);
        let cst = Complex64::new(0.2, 0.0);
        let got = log_det_ratio(&CircleMeasure::lebesgue(), &TrigPoly::constant(cst), 7).unwrap();
        assert!((got - 7.0 * cst).norm() < 1e-12);
        let cst = Complex64::new(0.2, 0.3);
        let got = log_det_ratio(&CircleMeasure::lebesgue(), &TrigPoly::constant(cst), 7).unwrap();
        assert!((got - 7.0 * cst).norm() < 1e-12);
    }

    #[test]
    fn log_det_ratio_strong_szego_at_forty() {
        let h = TrigPoly::from_pairs([(1, c(0.4)), (-1, c(0.4))]);
        let mu = CircleMeasure::lebesgue();
        let got = log_det_ratio(&mu, &h, 40).unwrap();
        // h_0 = 0, so n L_n(h) vanishes for Lebesgue
        assert!((got.re - 0.16).abs() < 2e-3);
        // dense Toeplitz determinant of e^{0.8 cos θ}: c_k = I_k(0.8)
        let nu = mu.exp_perturb(&h).unwrap();
        let m = nu.moments(40).unwrap();
        assert!((got.re - dense_log_det(&m, 40)).abs() < 1e-9);
    }

    #[test]
    fn ratio_reciprocity() {
        let h = TrigPoly::from_cos_sin(0.1, &[0.3, -0.2], &[0.25]);
        for mu in [
            CircleMeasure::geronimus(c(0.5)).unwrap(),
            CircleMeasure::lebesgue().with_atom(1.0, 0.3).unwrap(),
        ] {
            let fwd = log_det_ratio(&mu, &h, 12).unwrap();
            let back = log_det_ratio(&mu.exp_perturb(&h).unwrap(), &h.scale(-1.0), 12).unwrap();
            assert!((fwd + back).norm() < 1e-9);
        }
    }

    #[test]
    fn complex_route_agrees_with_real_route_on_real_symbols() {
        let h = TrigPoly::from_cos_sin(0.0, &[0.5], &[0.3]);
        let mu = CircleMeasure::geronimus(c(0.4)).unwrap();
        let real = log_det_ratio(&mu, &h, 16).unwrap();
        // a vanishing imaginary constant pushes it down the Gram route
        let hc = &h + &TrigPoly::constant(Complex64::new(0.0, 1e-9));
        let cplx = log_det_ratio(&mu, &hc, 16).unwrap();
        assert!((cplx - real - Complex64::new(0.0, 16e-9)).norm() < 1e-9);
    }

    #[test]
    fn complex_symbol_against_dense_determinant() {
        let h = TrigPoly::monomial(1, 0.3);
        let mu = CircleMeasure::lebesgue();
        let got = log_det_ratio(&mu, &h, 10).unwrap();
        // e^{0.3 z} is analytic, so the Toeplitz matrix is triangular with unit diagonal
        assert!(got.norm() < 1e-12);
    }

    #[test]
    fn kernel_trace_examples() {
        let h = TrigPoly::from_cos_sin(0.7, &[1.0], &[0.4]);
        let leb = VerblunskySeq::constant(c(0.0), 4).unwrap();
        assert!((kernel_diag_trace(&leb, &h, 9).unwrap() - 6.3).norm() < 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_seq(&mut rng, 20, 0.8);
        let one = TrigPoly::constant(1.0);
        assert!((kernel_diag_trace(&v, &one, 11).unwrap() - 11.0).norm() < 1e-13);
    }

    #[test]
    fn kernel_trace_matches_quadrature() {
        let h = TrigPoly::from_pairs([(1, c(1.0)), (-1, c(1.0))]);
        let mu = CircleMeasure::geronimus(c(0.5)).unwrap();
        let quad = mu.quadrature();
        let basis = node_basis(&quad, 16).unwrap();
        let oracle = kernel_diag_trace_quadrature(&basis, &quad.theta, &h, 16);
        let got = kernel_diag_trace(&VerblunskySeq::constant(c(0.5), 40).unwrap(), &h, 16).unwrap();
        assert!((got - oracle).norm() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn paraorthogonal_rule_reproduces_moments_and_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = random_seq(&mut rng, 24, 0.7);
        let quad = paraorthogonal_quadrature(&v, c(1.0)).unwrap();
        assert_eq!(quad.theta.len(), 25);
        let exact = crate::cmv::moments_from_verblunsky(&v, 24).unwrap();
        for (k, ck) in exact.iter().enumerate() {
            let got: Complex64 = quad
                .theta
                .iter()
                .zip(&quad.weight)
                .map(|(&t, &w)| w * Complex64::from_polar(1.0, -(k as f64) * t))
                .sum();
            assert!((got - ck).norm() < 1e-12, "c_{k}: {got} vs {ck}");
        }
        let back = node_basis(&quad, 24).unwrap().verblunsky;
        for j in 0..24 {
            assert!((back.alphas[j] - v.alphas[j]).norm() < 1e-10, "alpha_{j}");
        }
        assert!(paraorthogonal_quadrature(&v, c(0.5)).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("alpha.csv");
        let v = VerblunskySeq::from_fn(5, |j| Complex64::new(0.1 * j as f64, -0.05)).unwrap();
        v.write_csv(&path).unwrap();
        assert_eq!(VerblunskySeq::read_csv(&path).unwrap(), v);
    }
}
