//! CMV matrices and the Fredholm-determinant side of the relative asymptotics.
//!
//! `C = L M` with `L = Θ_0 ⊕ Θ_2 ⊕ …`, `M = 1 ⊕ Θ_1 ⊕ Θ_3 ⊕ …` and
//! `Θ_j = [[ᾱ_j, ρ_j], [ρ_j, −α_j]]`, so that `C_00 = ᾱ_0`, `C_10 = ρ_0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::linalg::{self, CMat};
use crate::opuc::VerblunskySeq;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Highest cumulant order handled by [`cumulant_e`] and [`f_m_truncated`].
pub const MAX_CUMULANT_ORDER: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct CmvMatrix {
    pub size: usize,
    pub entries: CMat,
    pub alphas: VerblunskySeq,
}

fn theta_entry(a: Complex64, r: usize, c: usize) -> Complex64 {
    let rho = Complex64::from((1.0 - a.norm_sqr()).max(0.0).sqrt());
    match (r, c) {
        (0, 0) => a.conj(),
        (0, 1) | (1, 0) => rho,
        _ => -a,
    }
}

/// Start of the 2×2 block containing `i` when blocks start at indices `≡ parity (mod 2)`.
fn block_start(i: i64, parity: i64) -> i64 {
    if (i - parity).rem_euclid(2) == 0 {
        i
    } else {
        i - 1
    }
}

/// The CMV pattern restricted to indices `start..start + size`.
///
/// `L` blocks start at indices of the given parity and `M` blocks at the
/// other parity. Entries are the true products `Σ_l L_il M_lk`, so `l` may lie
/// outside the window. `a(k)` is only queried for blocks that contribute.
pub fn cmv_window(
    a: &dyn Fn(i64) -> Result<Complex64>,
    start: i64,
    size: usize,
    parity: i64,
) -> Result<CMat> {
    let end = start + size as i64;
    let mut out = CMat::zeros(size, size);
    for i in start..end {
        let bl = block_start(i, parity);
        let al = a(bl)?;
        for l in bl..bl + 2 {
            let lv = theta_entry(al, (i - bl) as usize, (l - bl) as usize);
            let bm = block_start(l, parity + 1);
            for k in bm..bm + 2 {
                if k < start || k >= end {
                    continue;
                }
                let mv = theta_entry(a(bm)?, (l - bm) as usize, (k - bm) as usize);
                out[((i - start) as usize, (k - start) as usize)] += lv * mv;
            }
        }
    }
    Ok(out)
}

/// Top-left `T × T` truncation of the CMV matrix of `v`; uses `α_0..α_{T−1}`.
pub fn build_cmv(v: &VerblunskySeq, size: usize) -> Result<CmvMatrix> {
    if size > v.len() {
        return Err(Error::Range(format!(
            "CMV truncation {size} needs {size} Verblunsky coefficients, have {}",
            v.len()
        )));
    }
    let a = |k: i64| -> Result<Complex64> {
        if k == -1 {
            Ok(Complex64::new(-1.0, 0.0))
        } else {
            Ok(v.alphas[k as usize])
        }
    };
    let entries = cmv_window(&a, 0, size, 0)?;
    Ok(CmvMatrix {
        size,
        entries,
        alphas: v.truncated(size),
    })
}

/// `Σ_{j≥0} h_j A^j + Σ_{j>0} h_{−j} (A*)^j`.
pub fn h_of_matrix(a: &CMat, h: &TrigPoly) -> CMat {
    let n = a.nrows();
    let d = h.effective_degree();
    let adj = a.adjoint();
    let mut out = linalg::identity(n) * h.get(0);
    let mut pos = linalg::identity(n);
    let mut neg = linalg::identity(n);
    for j in 1..=d as i64 {
        pos = &pos * a;
        neg = &neg * &adj;
        if h.get(j) != ZERO {
            out += &pos * h.get(j);
        }
        if h.get(-j) != ZERO {
            out += &neg * h.get(-j);
        }
    }
    out
}

/// `h(C)` on the truncation. The top-left `T − 2 deg(h)` corner is exact.
pub fn h_of_cmv(c: &CmvMatrix, h: &TrigPoly) -> Result<CMat> {
    let d = h.effective_degree();
    if c.size <= 2 * d {
        return Err(Error::Truncation(format!(
            "size {} leaves no trusted corner for a degree-{d} symbol",
            c.size
        )));
    }
    Ok(h_of_matrix(&c.entries, h))
}

/// `c_k = c_0 conj((C^k)_{00})` for `k ≤ k_max`; only `α_0..α_{k−1}` enter `c_k`.
pub fn moments_from_verblunsky(v: &VerblunskySeq, k_max: usize) -> Result<Vec<Complex64>> {
    let t = 2 * k_max + 2;
    let c = build_cmv(&v.padded(t), t)?;
    let mut x = nalgebra::DVector::from_element(t, ZERO);
    x[0] = Complex64::new(1.0, 0.0);
    let mut out = vec![Complex64::from(v.mass)];
    for _ in 0..k_max {
        x = &c.entries * x;
        out.push(v.mass * x[0].conj());
    }
    Ok(out)
}

/// `2 deg(h) (⌈log₂(1 + ‖h‖_∞)⌉ + 8) + 8`.
pub fn pad_min(h: &TrigPoly) -> usize {
    let d = h.effective_degree();
    if d == 0 {
        return 0;
    }
    let s = (1.0 + h.sup_norm()).log2().ceil() as usize;
    2 * d * (s + 8) + 8
}

/// `log det(I + P_n(e^{h(C)} − I)P_n) − Tr P_n h(C) P_n`.
pub fn log_psi(v: &VerblunskySeq, h: &TrigPoly, n: usize, pad: usize) -> Result<Complex64> {
    let need = pad_min(h);
    if pad < need {
        return Err(Error::Truncation(format!(
            "pad {pad} is below the minimum {need} for this symbol"
        )));
    }
    if n == 0 {
        return Ok(ZERO);
    }
    let c = build_cmv(v, n + pad)?;
    let hc = h_of_cmv(&c, h)?;
    let e = linalg::expm(&hc);
    let ld = linalg::log_det(&linalg::corner(&e, n))?;
    Ok(ld - linalg::partial_trace(&hc, n))
}

/// `Ψ_n = det(I + P_n(e^{h(C)} − I)P_n) e^{−Tr P_n h(C) P_n}`.
pub fn psi_fredholm(v: &VerblunskySeq, h: &TrigPoly, n: usize, pad: usize) -> Result<Complex64> {
    Ok(log_psi(v, h, n, pad)?.exp())
}

/// `Φ_n(t) = log Ψ_n(t h)`.
pub fn phi_t(v: &VerblunskySeq, h: &TrigPoly, n: usize, pad: usize, t: f64) -> Result<Complex64> {
    log_psi(v, &h.scale(t), n, pad)
}

/// All compositions of `m` into positive parts.
pub fn compositions(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=m {
        for mut rest in compositions(m - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn zero_columns_outside(a: &mut CMat, keep: &[bool]) {
    for (j, &k) in keep.iter().enumerate() {
        if !k {
            a.column_mut(j).fill(ZERO);
        }
    }
}

/// `(1/(m+1)) Σ_j (−1)^{j−1} Σ_{l_1+…+l_j=m} Tr P H^{l_1} P … P H^{l_j} [H, P] / Π l_i!`
/// with `P` the coordinate projection given by `keep`.
pub fn composition_trace(h: &CMat, keep: &[bool], m: usize) -> Result<Complex64> {
    if m > MAX_CUMULANT_ORDER {
        return Err(Error::UnsupportedOrder(m));
    }
    if m == 0 {
        return Ok(ZERO);
    }
    let n = h.nrows();
    let mut powers = vec![linalg::identity(n)];
    for l in 1..=m {
        powers.push(&powers[l - 1] * h);
    }
    let mut hp = h.clone();
    zero_columns_outside(&mut hp, keep);
    let mut ph = h.clone();
    for (i, &k) in keep.iter().enumerate() {
        if !k {
            ph.row_mut(i).fill(ZERO);
        }
    }
    let comm = hp - ph;

    let mut total = ZERO;
    for comp in compositions(m) {
        let mut acc = powers[comp[0]].clone();
        for (i, &k) in keep.iter().enumerate() {
            if !k {
                acc.row_mut(i).fill(ZERO);
            }
        }
        for &l in &comp[1..] {
            zero_columns_outside(&mut acc, keep);
            acc = &acc * &powers[l];
        }
        // Tr(acc · comm) without forming the product
        let tr: Complex64 = (0..n)
            .map(|i| (0..n).map(|k| acc[(i, k)] * comm[(k, i)]).sum::<Complex64>())
            .sum();
        let weight: f64 = comp.iter().map(|&l| factorial(l)).product();
        let sign = if comp.len() % 2 == 1 { 1.0 } else { -1.0 };
        total += tr * (sign / weight);
    }
    Ok(total / (m as f64 + 1.0))
}

/// `E_m^{(n)}(h(C))`, read off a truncation of size `n + 2 deg(h)(m + 2) + 2`.
pub fn cumulant_e(v: &VerblunskySeq, h: &TrigPoly, n: usize, m: usize) -> Result<Complex64> {
    if m > MAX_CUMULANT_ORDER {
        return Err(Error::UnsupportedOrder(m));
    }
    let t = n + 2 * h.effective_degree() * (m + 2) + 2;
    let c = build_cmv(v, t)?;
    let hc = h_of_cmv(&c, h)?;
    let keep: Vec<bool> = (0..t).map(|i| i < n).collect();
    composition_trace(&hc, &keep, m)
}

/// Right limit `β_k`, `|k| ≤ W`, read at the last usable subsequence index.
#[derive(Clone, Debug, PartialEq)]
pub struct RightLimit {
    /// `β_{−W}..β_W`.
    pub betas: Vec<Complex64>,
    pub window: usize,
    /// Subsequence indices that fit the window.
    pub subseq: Vec<usize>,
    /// `max_{j ≥ J'} |α_{n_j+k} − β_k|` over the second half of `subseq`, per `k`.
    pub residual: Vec<f64>,
    /// Parity of the base index; CMV `L` blocks start at indices of this parity.
    pub parity: i64,
}

impl RightLimit {
    /// A constant two-sided sequence.
    pub fn constant(beta: Complex64, window: usize) -> Self {
        Self {
            betas: vec![beta; 2 * window + 1],
            window,
            subseq: Vec::new(),
            residual: vec![0.0; 2 * window + 1],
            parity: 0,
        }
    }

    pub fn get(&self, k: i64) -> Option<Complex64> {
        let w = self.window as i64;
        (k.abs() <= w).then(|| self.betas[(k + w) as usize])
    }
}

pub fn right_limit(v: &VerblunskySeq, subseq: &[usize], window: usize) -> Result<RightLimit> {
    let usable: Vec<usize> = subseq
        .iter()
        .copied()
        .filter(|&n| n >= window && n + window < v.len())
        .collect();
    let Some(&base) = usable.iter().max() else {
        return Err(Error::Range(format!(
            "no subsequence index fits a window of {window} inside {} coefficients",
            v.len()
        )));
    };
    let w = window as i64;
    let betas: Vec<Complex64> = (-w..=w)
        .map(|k| v.alphas[(base as i64 + k) as usize])
        .collect();
    let tail = &usable[usable.len() / 2..];
    let residual = (-w..=w)
        .map(|k| {
            tail.iter()
                .map(|&n| (v.alphas[(n as i64 + k) as usize] - betas[(k + w) as usize]).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(RightLimit {
        betas,
        window,
        subseq: usable,
        residual,
        parity: (base % 2) as i64,
    })
}

/// `F_m(h(C^R_M))` on relative indices `−M..M−1`, with `P_−` the indices `< 0`.
pub fn f_m_truncated(beta: &RightLimit, h: &TrigPoly, m: usize, big_m: usize) -> Result<Complex64> {
    if m > MAX_CUMULANT_ORDER {
        return Err(Error::UnsupportedOrder(m));
    }
    let need = 2 * (m + 1) * h.effective_degree();
    if big_m < need.max(1) {
        return Err(Error::Truncation(format!(
            "M = {big_m} is below the stabilization threshold {need}"
        )));
    }
    let a = |k: i64| {
        beta.get(k).ok_or_else(|| {
            Error::Range(format!(
                "right limit window {} does not contain index {k}",
                beta.window
            ))
        })
    };
    let start = -(big_m as i64);
    let c = cmv_window(&a, start, 2 * big_m, beta.parity)?;
    let hc = h_of_matrix(&c, h);
    let keep: Vec<bool> = (0..2 * big_m).map(|i| i < big_m).collect();
    composition_trace(&hc, &keep, m)
}
