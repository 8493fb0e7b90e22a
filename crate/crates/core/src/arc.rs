//! The single-arc case `α_n ≡ α`.
//!
//! Covers the stretching map `θ ↦ ω`, the symbols `s_k`, `v_k` of the powers
//! of the unwrapped CMV matrix, the transformed symbols `A^h`, `B^h`, the
//! quadratic form `Q_α`, the `QT` symbol algebra and the triangular split of
//! `h(C)` whose commutator trace gives `2 Q_α(h)`.
//!
//! Every quantity depends on `|α|` only. The phase enters the `QT`
//! quadruples through `t_k = (|α|/ᾱ) v_k`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cmv::{build_cmv, h_of_matrix};
use crate::error::{Error, Result};
use crate::fourier::{coeffs_from_samples, grid_size, sym_mul, TrigPoly};
use crate::linalg::CMat;
use crate::opuc::VerblunskySeq;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this `|α|` the diagonal correction of the split is not formed.
pub const MIN_ALPHA_FOR_SPLIT: f64 = 1e-8;

/// Largest `deg(h)` for the integer Chebyshev tables.
pub const MAX_CHEBYSHEV_DEGREE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcGeometry {
    pub alpha: Complex64,
    pub rho: f64,
    /// `2 arcsin|α|`; the arc is `[φ, 2π − φ)`.
    pub phi: f64,
}

impl ArcGeometry {
    pub fn new(alpha: Complex64) -> Result<Self> {
        let a = alpha.norm();
        if !(a < 1.0) {
            return Err(Error::Domain(format!("|alpha| = {a} is not below 1")));
        }
        Ok(Self {
            alpha,
            rho: (1.0 - a * a).sqrt(),
            phi: 2.0 * a.asin(),
        })
    }

    pub fn abs_alpha(&self) -> f64 {
        self.alpha.norm()
    }

    /// `ω = 2 arccos(ρ cos(θ/2))`.
    pub fn stretch(&self, theta: f64) -> f64 {
        2.0 * (self.rho * (theta / 2.0).cos()).clamp(-1.0, 1.0).acos()
    }

    /// `|α| / ᾱ`, the phase carried by the off-diagonal `QT` symbols.
    pub fn phase(&self) -> Complex64 {
        if self.alpha == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            self.abs_alpha() / self.alpha.conj()
        }
    }

    /// `[[s_1, −z v_1], [v_1, s̃_1]]` at `z`.
    pub fn transfer_matrix(&self, z: Complex64) -> [[Complex64; 2]; 2] {
        let (s1, v1) = self.seeds();
        [
            [s1.eval(z), -z * v1.eval(z)],
            [v1.eval(z), s1.reflect().eval(z)],
        ]
    }

    /// `s_1 = −|α|² + ρ²/z`, `v_1 = −|α|ρ(1 + 1/z)`.
    fn seeds(&self) -> (TrigPoly, TrigPoly) {
        let a = self.abs_alpha();
        let r2 = self.rho * self.rho;
        let s1 = TrigPoly::from_pairs([(0, Complex64::from(-a * a)), (-1, Complex64::from(r2))]);
        let av = Complex64::from(-a * self.rho);
        let v1 = TrigPoly::from_pairs([(0, av), (-1, av)]);
        (s1, v1)
    }
}

/// Symbols of `𝒟^k ≐ DT(s_k, t_k)` with the phase removed from `t_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkVk {
    pub k: i64,
    pub s: TrigPoly,
    pub v: TrigPoly,
}

impl SkVk {
    /// `s_{−k} = s̃_k`, `v_{−k} = −v_k`.
    pub fn negated(&self) -> Self {
        Self {
            k: -self.k,
            s: self.s.reflect(),
            v: -&self.v,
        }
    }
}

/// `s_k`, `v_k` for `k = 0..=k_max` from the transfer recursion.
pub fn sk_vk_recurrence(geom: &ArcGeometry, k_max: usize) -> Vec<SkVk> {
    let (s1, v1) = geom.seeds();
    let zv1 = v1.shift(1);
    let s1r = s1.reflect();
    let mut out = vec![SkVk {
        k: 0,
        s: TrigPoly::constant(1.0),
        v: TrigPoly::zero(0),
    }];
    for k in 1..=k_max {
        let prev = &out[k - 1];
        let s = &sym_mul(&s1, &prev.s) - &sym_mul(&zv1, &prev.v);
        let v = &sym_mul(&v1, &prev.s) + &sym_mul(&s1r, &prev.v);
        out.push(SkVk {
            k: k as i64,
            s: s.with_degree(k),
            v: v.with_degree(k),
        });
    }
    out
}

/// Looks up `(s_k, v_k)` for `|k| ≤ k_max` in a table from [`sk_vk_recurrence`].
pub fn sk_vk_signed(table: &[SkVk], k: i64) -> SkVk {
    let e = &table[k.unsigned_abs() as usize];
    if k >= 0 {
        e.clone()
    } else {
        e.negated()
    }
}

fn sin_ratio(k: i64, omega: f64) -> f64 {
    let d = (omega / 2.0).sin();
    if d.abs() < 1e-300 {
        2.0 * k as f64
    } else {
        (k as f64 * omega).sin() / d
    }
}

/// `s_k(e^{iθ}) = cos kω − i ρ sin(θ/2) sin kω / sin(ω/2)`.
pub fn s_closed(geom: &ArcGeometry, k: i64, theta: f64) -> Complex64 {
    let w = geom.stretch(theta);
    Complex64::new(
        (k as f64 * w).cos(),
        -sin_ratio(k, w) * geom.rho * (theta / 2.0).sin(),
    )
}

/// `v_k(e^{iθ}) = −|α| e^{−iθ/2} sin kω / sin(ω/2)`.
pub fn v_closed(geom: &ArcGeometry, k: i64, theta: f64) -> Complex64 {
    let w = geom.stretch(theta);
    -sin_ratio(k, w) * geom.abs_alpha() * Complex64::cis(-theta / 2.0)
}

/// `a_j = (h_j + h_{−j})/2` and `b_j = i(h_j − h_{−j})/2`, so that
/// `h = a_0 + 2Σ a_j cos jθ + 2Σ b_j sin jθ`.
pub fn cos_sin_coeffs(h: &TrigPoly) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = h.effective_degree() as i64;
    let a = (0..=n)
        .map(|j| {
            if j == 0 {
                h.get(0)
            } else {
                (h.get(j) + h.get(-j)) / 2.0
            }
        })
        .collect();
    let b = (0..=n)
        .map(|j| {
            if j == 0 {
                ZERO
            } else {
                I * (h.get(j) - h.get(-j)) / 2.0
            }
        })
        .collect();
    (a, b)
}

fn chebyshev_table(n: usize, second_kind: bool) -> Result<Vec<Vec<i128>>> {
    let overflow = || Error::Range(format!("Chebyshev degree {n} overflows the integer table"));
    let mut rows: Vec<Vec<i128>> = vec![vec![1]];
    if n == 0 {
        return Ok(rows);
    }
    rows.push(if second_kind { vec![0, 2] } else { vec![0, 1] });
    for k in 2..=n {
        let mut next = vec![0i128; k + 1];
        for (i, &c) in rows[k - 1].iter().enumerate() {
            next[i + 1] = next[i + 1]
                .checked_add(c.checked_mul(2).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
        for (i, &c) in rows[k - 2].iter().enumerate() {
            next[i] = next[i].checked_sub(c).ok_or_else(overflow)?;
        }
        rows.push(next);
    }
    Ok(rows)
}

fn poly_of(coeffs: &[i128], y: &TrigPoly) -> TrigPoly {
    let mut acc = TrigPoly::zero(0);
    for &c in coeffs.iter().rev() {
        acc = &sym_mul(&acc, y) + &TrigPoly::constant(c as f64);
    }
    acc
}

fn ab_linear(geom: &ArcGeometry, h: &TrigPoly) -> Result<(TrigPoly, TrigPoly)> {
    let n = h.effective_degree();
    if n > MAX_CHEBYSHEV_DEGREE {
        return Err(Error::Range(format!(
            "degree {n} exceeds the Chebyshev table limit {MAX_CHEBYSHEV_DEGREE}"
        )));
    }
    let (a, b) = cos_sin_coeffs(h);
    let tt = chebyshev_table(n, false)?;
    let uu = chebyshev_table(n.saturating_sub(1), true)?;
    // T_{2j}(x) = T_j(y) and U_{2j−1}(x) = 2x U_{j−1}(y) with
    // x = ρ cos(θ/2), y = 2x² − 1 = ρ² cos θ − |α|².
    let r2 = geom.rho * geom.rho;
    let al = geom.abs_alpha();
    let y = TrigPoly::from_pairs([
        (-1, Complex64::from(r2 / 2.0)),
        (0, Complex64::from(-al * al)),
        (1, Complex64::from(r2 / 2.0)),
    ]);
    let mut big_a = TrigPoly::constant(a[0]);
    let mut odd_sum = TrigPoly::zero(0);
    for j in 1..=n {
        if a[j] != ZERO {
            big_a = &big_a + &poly_of(&tt[j], &y).scale(2.0 * a[j]);
        }
        if b[j] != ZERO {
            odd_sum = &odd_sum + &poly_of(&uu[j - 1], &y).scale(b[j]);
        }
    }
    // 2(sin(θ/2) + |α|cos(θ/2)) · 2ρcos(θ/2) = 2ρ(sin θ + |α|(1 + cos θ))
    let prefactor = TrigPoly::from_pairs([
        (-1, Complex64::new(al * geom.rho, geom.rho)),
        (0, Complex64::from(2.0 * al * geom.rho)),
        (1, Complex64::new(al * geom.rho, -geom.rho)),
    ]);
    let big_b = sym_mul(&prefactor, &odd_sum);
    Ok((big_a.with_degree(n), big_b.with_degree(n)))
}

fn require_real(h: &TrigPoly) -> Result<()> {
    let tol = 1e-12 * h.l1_norm().max(1.0);
    if h.is_real_symbol(tol) {
        Ok(())
    } else {
        Err(Error::Domain("the symbol h must be real-valued".into()))
    }
}

/// `A^h` and `B^h` through the integer Chebyshev expansions.
pub fn ab_symbols(geom: &ArcGeometry, h: &TrigPoly) -> Result<(TrigPoly, TrigPoly)> {
    require_real(h)?;
    ab_linear(geom, h)
}

/// `A^h` and `B^h` by sampling their defining series through the stretch
/// on `m` angles, then transforming back.
pub fn ab_symbols_sampled(geom: &ArcGeometry, h: &TrigPoly, m: usize) -> Result<(TrigPoly, TrigPoly)> {
    require_real(h)?;
    let n = h.effective_degree();
    let (a, b) = cos_sin_coeffs(h);
    let al = geom.abs_alpha();
    let mut sa = Vec::with_capacity(m);
    let mut sb = Vec::with_capacity(m);
    for i in 0..m {
        let theta = 2.0 * PI * i as f64 / m as f64;
        let w = geom.stretch(theta);
        let mut va = a[0];
        let mut vb = ZERO;
        for j in 1..=n {
            va += 2.0 * a[j] * (j as f64 * w).cos();
            vb += b[j] * sin_ratio(j as i64, w);
        }
        sa.push(va);
        sb.push(2.0 * ((theta / 2.0).sin() + al * (theta / 2.0).cos()) * vb);
    }
    Ok((coeffs_from_samples(&sa, n)?, coeffs_from_samples(&sb, n)?))
}

/// `Σ_{j≥1} j A_j A_{−j} + Σ_{j≥1} j B_j B_{−j}`.
pub fn q_from_ab(a: &TrigPoly, b: &TrigPoly) -> Complex64 {
    a.szego_sum() + b.szego_sum()
}

/// `Q_α(h)`. Complex `h` is handled by the bilinear extension through
/// complex `a_j`, `b_j`.
pub fn q_alpha(geom: &ArcGeometry, h: &TrigPoly) -> Result<Complex64> {
    let (a, b) = ab_linear(geom, h)?;
    Ok(q_from_ab(&a, &b))
}

/// `S = Σ h_j s_j` and `V = Σ h_j v_j` over `|j| ≤ deg h`.
pub fn s_v_symbols(geom: &ArcGeometry, h: &TrigPoly) -> (TrigPoly, TrigPoly) {
    let n = h.effective_degree();
    let table = sk_vk_recurrence(geom, n);
    let mut s = TrigPoly::zero(n);
    let mut v = TrigPoly::zero(n);
    for j in -(n as i64)..=n as i64 {
        let c = h.get(j);
        if c == ZERO {
            continue;
        }
        let e = sk_vk_signed(&table, j);
        s = &s + &e.s.scale(c);
        v = &v + &e.v.scale(c);
    }
    (s, v)
}

/// Symbol quadruple of `QT(s, t, p, q)` acting on `ℓ²(ℤ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QtSymbol {
    pub s: TrigPoly,
    pub t: TrigPoly,
    pub p: TrigPoly,
    pub q: TrigPoly,
}

impl QtSymbol {
    pub fn identity() -> Self {
        Self {
            s: TrigPoly::constant(1.0),
            t: TrigPoly::zero(0),
            p: TrigPoly::zero(0),
            q: TrigPoly::constant(1.0),
        }
    }

    /// `DT(s, t) = QT(s, t, t, s)`.
    pub fn dt(s: TrigPoly, t: TrigPoly) -> Self {
        Self {
            s: s.clone(),
            t: t.clone(),
            p: t,
            q: s,
        }
    }

    /// `DT(s_k, (|α|/ᾱ) v_k)`, the symbol of `𝒟^k`.
    pub fn power(geom: &ArcGeometry, e: &SkVk) -> Self {
        Self::dt(e.s.clone(), e.v.scale(geom.phase()))
    }

    /// `QT(s, t, p, q)* = QT(s*, −p, −t, q*)`.
    pub fn adjoint(&self) -> Self {
        Self {
            s: self.s.star(),
            t: -&self.p,
            p: -&self.t,
            q: self.q.star(),
        }
    }

    /// Dense matrix on rows and columns `lo..=hi` of `ℤ`, with
    /// `T(s)_{jk} = s_{j−k}` and `J e_k = e_{1−k}`.
    pub fn matrix(&self, lo: i64, hi: i64) -> CMat {
        let n = (hi - lo + 1) as usize;
        CMat::from_fn(n, n, |r, c| {
            let j = lo + r as i64;
            let k = lo + c as i64;
            match (j > 0, k > 0) {
                (false, false) => self.s.get(j - k).conj(),
                (false, true) => self.t.get(1 - j - k),
                (true, false) => -self.p.get(1 - j - k).conj(),
                (true, true) => self.q.get(j - k),
            }
        })
    }
}

/// Product of two `QT` symbols, exact up to finitely many matrix entries.
pub fn qt_mul(x: &QtSymbol, y: &QtSymbol) -> QtSymbol {
    QtSymbol {
        s: &sym_mul(&x.s, &y.s) - &sym_mul(&x.t.star(), &y.p),
        t: &sym_mul(&x.s.star(), &y.t) + &sym_mul(&x.t, &y.q),
        p: &sym_mul(&x.p, &y.s) + &sym_mul(&x.q.star(), &y.p),
        q: &sym_mul(&x.q, &y.q) - &sym_mul(&x.p.star(), &y.t),
    }
}

/// Position on `ℤ` of the 0-based one-sided index `i` under the unwrapping.
pub fn unwrap_index(i: usize) -> i64 {
    let i = i as i64;
    if i % 2 == 0 {
        i / 2 + 1
    } else {
        (1 - i) / 2
    }
}

/// `R C R*` restricted to `lo..=hi`, from a one-sided matrix large enough to cover it.
pub fn unwrap_matrix(c: &CMat, lo: i64, hi: i64) -> CMat {
    let n = (hi - lo + 1) as usize;
    let mut out = CMat::zeros(n, n);
    for i in 0..c.nrows() {
        let j = unwrap_index(i);
        if j < lo || j > hi {
            continue;
        }
        for k in 0..c.ncols() {
            let l = unwrap_index(k);
            if l < lo || l > hi {
                continue;
            }
            out[((j - lo) as usize, (l - lo) as usize)] = c[(i, k)];
        }
    }
    out
}

/// The three evaluations of `Tr[U, L]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorTraces {
    /// Diagonal of `[h(C), L]` summed over the exact rows of a truncation.
    pub numerical: Complex64,
    /// `2Σ j S_j S_{−j} − Σ j (V_j² + V_{−j}²)`.
    pub symbol_sv: Complex64,
    /// `2Σ j A_j A_{−j} + 2Σ j B_j B_{−j}`.
    pub symbol_ab: Complex64,
}

impl CommutatorTraces {
    pub fn max_disagreement(&self) -> f64 {
        let d1 = (self.numerical - self.symbol_sv).norm();
        let d2 = (self.numerical - self.symbol_ab).norm();
        let d3 = (self.symbol_sv - self.symbol_ab).norm();
        d1.max(d2).max(d3)
    }
}

/// Smallest truncation accepted by [`trace_commutator`].
pub fn min_commutator_size(h: &TrigPoly) -> usize {
    8 * h.effective_degree() + 16
}

/// `h(C)` and its lower part `L` on a size-`t` truncation of the constant-α CMV matrix.
///
/// `L` is the strictly lower part of `h(C)` plus `(ρ/|α|) V_0` on the odd
/// diagonal positions (those unwrapped to `j ≤ 0`).
pub fn lower_split(geom: &ArcGeometry, h: &TrigPoly, t: usize) -> Result<(CMat, CMat)> {
    let al = geom.abs_alpha();
    if al < MIN_ALPHA_FOR_SPLIT {
        return Err(Error::Domain(format!(
            "|alpha| = {al:e} is below {MIN_ALPHA_FOR_SPLIT:e}; the split degenerates"
        )));
    }
    let v = VerblunskySeq::constant(geom.alpha, t)?;
    let c = build_cmv(&v, t)?;
    let hc = h_of_matrix(&c.entries, h);
    let (_, big_v) = s_v_symbols(geom, h);
    let corr = geom.rho / al * big_v.get(0);
    let lower = CMat::from_fn(t, t, |i, k| {
        if i > k {
            hc[(i, k)]
        } else if i == k && i % 2 == 1 {
            corr
        } else {
            ZERO
        }
    });
    Ok((hc, lower))
}

/// Sum of `[h(C), L]_{ii}` over `i < t − 4 deg(h)`, where every entry is exact.
pub fn commutator_trace_numerical(geom: &ArcGeometry, h: &TrigPoly, t: usize) -> Result<Complex64> {
    let need = min_commutator_size(h);
    if t < need {
        return Err(Error::Truncation(format!(
            "commutator trace needs T >= {need}, got {t}"
        )));
    }
    let (hc, lower) = lower_split(geom, h, t)?;
    let d = h.effective_degree();
    let band = 2 * d;
    let rows = t - 4 * d;
    let mut tr = ZERO;
    for i in 0..rows {
        let lo = i.saturating_sub(band);
        let hi = (i + band + 1).min(t);
        for l in lo..hi {
            tr += hc[(i, l)] * lower[(l, i)] - lower[(i, l)] * hc[(l, i)];
        }
    }
    Ok(tr)
}

pub fn trace_commutator(geom: &ArcGeometry, h: &TrigPoly, t: usize) -> Result<CommutatorTraces> {
    let numerical = commutator_trace_numerical(geom, h, t)?;
    let (s, v) = s_v_symbols(geom, h);
    let n = s.degree().max(v.degree()) as i64;
    let mut symbol_sv = ZERO;
    for j in 1..=n {
        let jf = j as f64;
        symbol_sv += 2.0 * jf * s.get(j) * s.get(-j);
        symbol_sv -= jf * (v.get(j) * v.get(j) + v.get(-j) * v.get(-j));
    }
    let symbol_ab = 2.0 * q_alpha(geom, h)?;
    Ok(CommutatorTraces {
        numerical,
        symbol_sv,
        symbol_ab,
    })
}

/// Default truncation for [`trace_commutator`]: `max(128, 8 deg + 16)`.
pub fn default_commutator_size(h: &TrigPoly) -> usize {
    min_commutator_size(h).max(128)
}

/// Grid used by the sampling route for `A^h`, `B^h`.
pub fn default_sampling_grid(h: &TrigPoly) -> usize {
    grid_size(h.effective_degree()).max(512)
}
