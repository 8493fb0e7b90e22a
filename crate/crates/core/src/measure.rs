//! Finite measures on the unit circle and their moments.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;

pub const DEFAULT_QUAD_POINTS: usize = 1 << 14;

/// Parameters of the Geronimus measure, whose Verblunsky coefficients are all `alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeronimusParams {
    pub alpha: Complex64,
    pub rho: f64,
    /// Half-width of the gap `[-φ, φ]`.
    pub phi: f64,
    /// Angle of the possible atom, from `1 + ᾱ = |1 + ᾱ| e^{iβ/2}`.
    pub beta: f64,
    /// Atom weight, zero when `|α + ½| ≤ ½`.
    pub q: f64,
}

impl GeronimusParams {
    pub fn new(alpha: Complex64) -> Result<Self> {
        let a = alpha.norm();
        if !(a < 1.0) {
            return Err(Error::Domain(format!(
                "Geronimus parameter must satisfy |alpha| < 1, got {a}"
            )));
        }
        let rho = (1.0 - a * a).sqrt();
        let phi = 2.0 * a.asin();
        let beta = 2.0 * (Complex64::new(1.0, 0.0) + alpha.conj()).arg();
        let shifted = (alpha + 0.5).norm();
        let q = if shifted > 0.5 {
            2.0 / (1.0 + alpha).norm_sqr() * (shifted * shifted - 0.25)
        } else {
            0.0
        };
        Ok(Self {
            alpha,
            rho,
            phi,
            beta,
            q,
        })
    }

    /// Density against `dθ/2π`; zero on the gap.
    pub fn density(&self, theta: f64) -> f64 {
        let theta = theta.rem_euclid(2.0 * PI);
        if theta <= self.phi || theta >= 2.0 * PI - self.phi {
            return 0.0;
        }
        let c = (self.phi / 2.0).cos();
        let x = (theta / 2.0).cos();
        let num = (c * c - x * x).max(0.0).sqrt();
        let den = ((theta - self.beta) / 2.0).sin();
        if den.abs() < 1e-9 {
            // one-sided limit across the removable 0/0
            let h = 1e-6;
            return 0.5 * (self.density(theta - h) + self.density(theta + h));
        }
        num / ((1.0 + self.alpha).norm() * den)
    }
}

/// A zero of order `2α` at `e^{iθ}`; the jump exponent must vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct FhSingularity {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Density {
    /// `w ≡ 1`.
    Uniform,
    Geronimus(GeronimusParams),
    /// `Π |z − z_j|^{2α_j}`.
    FisherHartwig(Vec<FhSingularity>),
    /// `Π ρ_j² / |Φ*_N(z)|²`, the probability measure whose first `N`
    /// Verblunsky coefficients are the given ones and the rest vanish.
    BernsteinSzego(Vec<Complex64>),
    /// No absolutely continuous part; the measure is its atoms.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub theta: f64,
    pub weight: f64,
}

/// Nodes and weights with `∫ f dμ ≈ Σ weight_m f(e^{iθ_m})`; atoms are exact nodes.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub theta: Vec<f64>,
    pub weight: Vec<f64>,
}

impl Quadrature {
    pub fn z(&self) -> Vec<Complex64> {
        self.theta.iter().map(|&t| Complex64::cis(t)).collect()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.theta
            .iter()
            .zip(&self.weight)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.weight.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircleMeasure {
    pub density: Density,
    pub atoms: Vec<Atom>,
    /// Real symbol `h` with `dμ = e^{h} dμ_0`.
    pub perturbation: Option<TrigPoly>,
    pub quad_points: usize,
}

impl CircleMeasure {
    fn from_density(density: Density) -> Self {
        Self {
            density,
            atoms: Vec::new(),
            perturbation: None,
            quad_points: DEFAULT_QUAD_POINTS,
        }
    }

    pub fn lebesgue() -> Self {
        Self::from_density(Density::Uniform)
    }

    pub fn geronimus(alpha: Complex64) -> Result<Self> {
        let params = GeronimusParams::new(alpha)?;
        let mut mu = Self::from_density(Density::Geronimus(params.clone()));
        if params.q > 0.0 {
            mu.atoms.push(Atom {
                theta: params.beta.rem_euclid(2.0 * PI),
                weight: params.q,
            });
        }
        Ok(mu)
    }

    pub fn fisher_hartwig(params: Vec<FhSingularity>) -> Result<Self> {
        for p in &params {
            if !(p.alpha >= 0.0) || !p.theta.is_finite() {
                return Err(Error::Domain(format!(
                    "Fisher-Hartwig exponent must be finite and >= 0, got {}",
                    p.alpha
                )));
            }
            if p.beta != 0.0 {
                return Err(Error::Domain(format!(
                    "Fisher-Hartwig jump beta = {} gives a non-positive weight; only beta = 0 is supported",
                    p.beta
                )));
            }
        }
        if params.is_empty() {
            return Ok(Self::lebesgue());
        }
        Ok(Self::from_density(Density::FisherHartwig(params)))
    }

    /// The Bernstein–Szegő measure of a finite coefficient list.
    pub fn bernstein_szego(alphas: Vec<Complex64>) -> Result<Self> {
        if let Some((j, a)) = alphas.iter().enumerate().find(|(_, a)| a.norm() >= 1.0) {
            return Err(Error::PositivityLoss {
                index: j,
                modulus: a.norm(),
            });
        }
        Ok(Self::from_density(Density::BernsteinSzego(alphas)))
    }

    /// A finite sum of point masses.
    pub fn discrete(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() || atoms.iter().any(|a| !(a.weight > 0.0)) {
            return Err(Error::Domain("a discrete measure needs positive atom weights".into()));
        }
        let mut mu = Self::from_density(Density::Zero);
        mu.atoms = atoms
            .into_iter()
            .map(|a| Atom {
                theta: a.theta.rem_euclid(2.0 * PI),
                weight: a.weight,
            })
            .collect();
        Ok(mu)
    }

    pub fn with_atom(mut self, theta: f64, weight: f64) -> Result<Self> {
        if !(weight > 0.0) {
            return Err(Error::Domain(format!("atom weight must be positive, got {weight}")));
        }
        let weight = match &self.perturbation {
            Some(h) => weight * h.eval_angle(theta).re.exp(),
            None => weight,
        };
        self.atoms.push(Atom {
            theta: theta.rem_euclid(2.0 * PI),
            weight,
        });
        Ok(self)
    }

    pub fn with_quad_points(mut self, m: usize) -> Self {
        self.quad_points = m;
        self
    }

    /// Density of the absolutely continuous part against `dθ/2π`.
    pub fn density_at(&self, theta: f64) -> f64 {
        let base = match &self.density {
            Density::Uniform => 1.0,
            Density::Geronimus(g) => g.density(theta),
            Density::FisherHartwig(ps) => ps
                .iter()
                .map(|p| {
                    let d = (Complex64::cis(theta) - Complex64::cis(p.theta)).norm();
                    d.powf(2.0 * p.alpha)
                })
                .product(),
            Density::BernsteinSzego(alphas) => bernstein_szego_density(alphas, theta),
            Density::Zero => 0.0,
        };
        match &self.perturbation {
            Some(h) => base * h.eval_angle(theta).re.exp(),
            None => base,
        }
    }

    /// Nodes for the absolutely continuous part followed by the atoms.
    pub fn quadrature(&self) -> Quadrature {
        let m = self.quad_points;
        let mut theta = Vec::with_capacity(m + self.atoms.len());
        let mut weight = Vec::with_capacity(m + self.atoms.len());
        match &self.density {
            Density::Zero => {}
            Density::Geronimus(g) if g.phi > 0.0 => {
                // θ = π + (π − φ) sin u clusters nodes at the square-root edges
                let half = PI - g.phi;
                for j in 0..m {
                    let u = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    let t = PI + half * u.sin();
                    theta.push(t);
                    weight.push(self.density_at(t) * half * u.cos().abs() / (2.0 * m as f64));
                }
            }
            _ => {
                for j in 0..m {
                    let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    theta.push(t);
                    weight.push(self.density_at(t) / m as f64);
                }
            }
        }
        for a in &self.atoms {
            theta.push(a.theta);
            weight.push(a.weight);
        }
        Quadrature { theta, weight }
    }

    pub fn total_mass(&self) -> f64 {
        self.quadrature().mass()
    }

    /// `c_k = ∫ z^{-k} dμ` for `k = 0..=k_max`.
    pub fn moments(&self, k_max: usize) -> Result<Vec<Complex64>> {
        let needed = 8 * k_max;
        if self.quad_points < needed {
            return Err(Error::Resolution {
                needed,
                got: self.quad_points,
            });
        }
        let quad = self.quadrature();
        Ok((0..=k_max as i64)
            .map(|k| quad.integrate(|t| Complex64::cis(-(k as f64) * t)))
            .collect())
    }

    /// `dμ ↦ e^{h} dμ` for real `h`.
    pub fn exp_perturb(&self, h: &TrigPoly) -> Result<Self> {
        if !h.is_real_symbol(1e-14) {
            return Err(Error::Domain(
                "exp_perturb needs a real symbol; complex h goes through the determinant route"
                    .into(),
            ));
        }
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.weight *= h.eval_angle(a.theta).re.exp();
        }
        out.perturbation = Some(match &self.perturbation {
            Some(g) => g + h,
            None => h.clone(),
        });
        Ok(out)
    }
}

/// `Π ρ_j² / |Φ*_N(e^{iθ})|²`, evaluating `Φ*_N` by the recursion.
fn bernstein_szego_density(alphas: &[Complex64], theta: f64) -> f64 {
    let z = Complex64::cis(theta);
    let mut phi = Complex64::new(1.0, 0.0);
    let mut phi_star = Complex64::new(1.0, 0.0);
    let mut norm = 1.0;
    for &a in alphas {
        let next = z * phi - a.conj() * phi_star;
        phi_star -= a * z * phi;
        phi = next;
        norm *= 1.0 - a.norm_sqr();
    }
    norm / phi_star.norm_sqr()
}
