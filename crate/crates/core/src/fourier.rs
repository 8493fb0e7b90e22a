//! Laurent polynomials on the unit circle.
//!
//! A [`TrigPoly`] stores the two-sided coefficient vector `h_{-K}, ..., h_K`
//! densely. All symbol manipulations in the crate (products, exponentials,
//! triangular projections, reflections) go through this type.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Finite two-sided Fourier series `Σ_{|k| ≤ K} h_k z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![ZERO; 2 * degree + 1],
        }
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self {
            degree: 0,
            coeffs: vec![c.into()],
        }
    }

    /// `c z^k`.
    pub fn monomial(k: i64, c: impl Into<Complex64>) -> Self {
        let mut p = Self::zero(k.unsigned_abs() as usize);
        p.set(k, c.into());
        p
    }

    /// Builds a polynomial from `(k, h_k)` pairs; repeated indices accumulate.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let degree = pairs
            .iter()
            .map(|(k, _)| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let mut p = Self::zero(degree);
        for (k, c) in pairs {
            let idx = p.index(k);
            p.coeffs[idx] += c;
        }
        p
    }

    /// Coefficients listed from `k_min` upwards.
    pub fn from_slice(k_min: i64, coeffs: &[Complex64]) -> Self {
        Self::from_pairs(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (k_min + i as i64, c)),
        )
    }

    /// `h(θ) = c_0 + Σ_j a_j cos jθ + Σ_j b_j sin jθ` with `a`, `b` indexed from `j = 1`.
    pub fn from_cos_sin(c0: f64, cos: &[f64], sin: &[f64]) -> Self {
        let degree = cos.len().max(sin.len());
        let mut p = Self::zero(degree);
        p.set(0, Complex64::from(c0));
        for (j, &a) in cos.iter().enumerate() {
            let k = j as i64 + 1;
            p.add_at(k, Complex64::from(a / 2.0));
            p.add_at(-k, Complex64::from(a / 2.0));
        }
        for (j, &b) in sin.iter().enumerate() {
            let k = j as i64 + 1;
            // sin jθ = (z^j - z^{-j}) / 2i
            p.add_at(k, Complex64::new(0.0, -b / 2.0));
            p.add_at(-k, Complex64::new(0.0, b / 2.0));
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Largest `|k|` with a non-zero coefficient.
    pub fn effective_degree(&self) -> usize {
        (0..=self.degree)
            .rev()
            .find(|&k| {
                let k = k as i64;
                self.get(k) != ZERO || self.get(-k) != ZERO
            })
            .unwrap_or(0)
    }

    /// Drops structurally zero outer coefficients.
    pub fn trimmed(&self) -> Self {
        self.with_degree(self.effective_degree())
    }

    /// Re-embeds into degree `degree`, truncating if smaller.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut p = Self::zero(degree);
        let d = degree.min(self.degree) as i64;
        for k in -d..=d {
            p.set(k, self.get(k));
        }
        p
    }

    fn index(&self, k: i64) -> usize {
        (k + self.degree as i64) as usize
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.degree {
            ZERO
        } else {
            self.coeffs[self.index(k)]
        }
    }

    /// Sets `h_k`, growing the degree if needed.
    pub fn set(&mut self, k: i64, c: Complex64) {
        if k.unsigned_abs() as usize > self.degree {
            *self = self.with_degree(k.unsigned_abs() as usize);
        }
        let idx = self.index(k);
        self.coeffs[idx] = c;
    }

    fn add_at(&mut self, k: i64, c: Complex64) {
        let cur = self.get(k);
        self.set(k, cur + c);
    }

    /// Coefficients `h_{-K}, ..., h_K`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let d = self.degree as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - d, c))
    }

    pub fn eval_angle(&self, theta: f64) -> Complex64 {
        self.iter()
            .map(|(k, c)| c * Complex64::cis(k as f64 * theta))
            .sum()
    }

    /// Evaluates at an arbitrary non-zero `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Horner on z^K h(z), then divide by z^K.
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc / z.powi(self.degree as i32)
    }

    /// `h_{-k} = conj(h_k)` for every `k`, within `tol`.
    pub fn is_real_symbol(&self, tol: f64) -> bool {
        let d = self.degree as i64;
        (0..=d).all(|k| (self.get(-k) - self.get(k).conj()).norm() <= tol)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&x| x * c).collect(),
        }
    }

    /// `s̃(z) = s(1/z)`.
    pub fn reflect(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            degree: self.degree,
            coeffs,
        }
    }

    /// `s̄(z) = conj(s(z̄))`, i.e. conjugated coefficients.
    pub fn conj_coeffs(&self) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// `s*(z) = conj(s(1/z̄))`; on the circle this is the pointwise conjugate.
    pub fn star(&self) -> Self {
        self.reflect().conj_coeffs()
    }

    /// `z^j s(z)`.
    pub fn shift(&self, j: i64) -> Self {
        Self::from_pairs(self.iter().map(|(k, c)| (k + j, c)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self.degree.max(other.degree) as i64;
        (-d..=d)
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Maximum of `|h|` over a uniform grid of `points` angles.
    pub fn sup_norm_on_grid(&self, points: usize) -> f64 {
        (0..points)
            .map(|m| self.eval_angle(2.0 * PI * m as f64 / points as f64).norm())
            .fold(0.0, f64::max)
    }

    /// Grid estimate of `‖h‖_∞` fine enough for the degree in play.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm_on_grid((16 * (self.degree + 1)).max(256))
    }

    /// Samples `h(θ_m)` at `θ_m = 2πm/M`.
    pub fn samples(&self, m: usize) -> Vec<Complex64> {
        (0..m)
            .map(|j| self.eval_angle(2.0 * PI * j as f64 / m as f64))
            .collect()
    }

    /// `Σ_{k ≥ 1} k h_k h_{-k}`, the quadratic form of the Strong Szegő limit.
    pub fn szego_sum(&self) -> Complex64 {
        (1..=self.degree as i64)
            .map(|k| k as f64 * self.get(k) * self.get(-k))
            .sum()
    }
}

/// Power-of-two grid size used by every sampling transform for degree `k`.
pub fn grid_size(k: usize) -> usize {
    (4 * k + 4).next_power_of_two()
}

/// Discrete Fourier coefficients `h_k = (1/M) Σ_m s_m e^{-ikθ_m}`, `|k| ≤ K`.
pub fn coeffs_from_samples(samples: &[Complex64], degree: usize) -> Result<TrigPoly> {
    let m = samples.len();
    let needed = 4 * degree + 4;
    if m < needed {
        return Err(Error::Degree {
            degree,
            needed,
            got: m,
        });
    }
    let twiddle: Vec<Complex64> = (0..m)
        .map(|j| Complex64::cis(-2.0 * PI * j as f64 / m as f64))
        .collect();
    let mut p = TrigPoly::zero(degree);
    let d = degree as i64;
    for k in -d..=d {
        let kk = k.rem_euclid(m as i64) as usize;
        let sum: Complex64 = samples
            .iter()
            .enumerate()
            .map(|(j, &s)| s * twiddle[(kk * j) % m])
            .sum();
        p.set(k, sum / m as f64);
    }
    Ok(p)
}

/// `Σ_k √(1+|k|) |h_k|`.
pub fn b_half_norm(h: &TrigPoly) -> f64 {
    h.iter()
        .map(|(k, c)| ((1 + k.unsigned_abs()) as f64).sqrt() * c.norm())
        .sum()
}

/// Laurent convolution.
pub fn sym_mul(f: &TrigPoly, g: &TrigPoly) -> TrigPoly {
    let mut out = TrigPoly::zero(f.degree + g.degree);
    for (i, a) in f.iter() {
        if a == ZERO {
            continue;
        }
        for (j, b) in g.iter() {
            out.add_at(i + j, a * b);
        }
    }
    out
}

/// Default output degree for [`sym_exp`].
///
/// Starts from `max(8, 4K + ⌈4‖h‖_∞⌉)` and doubles until the coefficients
/// beyond it are below `1e-14` relative to the largest one, so that doubling
/// the degree changes nothing at the `1e-12` level.
pub fn default_exp_degree(h: &TrigPoly) -> usize {
    let k = h.effective_degree();
    let mut k_out = (4 * k + (4.0 * h.sup_norm()).ceil() as usize).max(8);
    loop {
        let wide = sym_exp(h, 2 * k_out);
        let scale = wide.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tail = wide
            .iter()
            .filter(|(j, _)| j.unsigned_abs() as usize > k_out)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        if tail <= 1e-14 * scale || k_out >= 4096 {
            return k_out;
        }
        k_out *= 2;
    }
}

/// Coefficients of `e^h` up to degree `k_out`, by sampling and transforming.
pub fn sym_exp(h: &TrigPoly, k_out: usize) -> TrigPoly {
    let m = grid_size(k_out);
    let samples: Vec<Complex64> = h.samples(m).into_iter().map(|v| v.exp()).collect();
    coeffs_from_samples(&samples, k_out).expect("grid size satisfies the degree bound")
}

/// The five triangular projections of a Laurent polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularParts {
    /// Strictly positive powers.
    pub plus: TrigPoly,
    /// Strictly negative powers.
    pub minus: TrigPoly,
    /// The constant term.
    pub zero: TrigPoly,
    /// Non-negative powers.
    pub plus_closed: TrigPoly,
    /// Non-positive powers.
    pub minus_closed: TrigPoly,
}

pub fn triangular_parts(l: &TrigPoly) -> TriangularParts {
    let pick = |keep: &dyn Fn(i64) -> bool| {
        let mut p = TrigPoly::zero(l.degree);
        for (k, c) in l.iter() {
            if keep(k) {
                p.set(k, c);
            }
        }
        p
    };
    TriangularParts {
        plus: pick(&|k| k > 0),
        minus: pick(&|k| k < 0),
        zero: pick(&|k| k == 0),
        plus_closed: pick(&|k| k >= 0),
        minus_closed: pick(&|k| k <= 0),
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let d = self.degree.max(rhs.degree);
        let mut out = self.with_degree(d);
        for (k, c) in rhs.iter() {
            out.add_at(k, c);
        }
        out
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self + &(-rhs)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        sym_mul(self, rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct TrigPolyJson {
    k_min: i64,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TrigPolyJson {
            k_min: -(self.degree as i64),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = TrigPolyJson::deserialize(deserializer)?;
        let coeffs: Vec<Complex64> = raw
            .coeffs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        Ok(TrigPoly::from_slice(raw.k_min, &coeffs))
    }
}
