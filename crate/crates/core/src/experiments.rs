//! Named experiments sweeping `n` and comparing `Ψ_n` against its predicted limit.
//!
//! Every `Ψ_n` is computed twice. The Fredholm route takes the determinant
//! on a CMV truncation. The moment route takes the determinant ratio of the
//! two measures and subtracts `∫ h K_n dμ` evaluated on quadrature nodes.
//! Sequence sources use the Gauss–Szegő rule of their first `n_max + pad`
//! coefficients as the measure for the moment route.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arc::{self, ArcGeometry};
use crate::cmv::{self, RightLimit};
use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::measure::{Atom, CircleMeasure};
use crate::opuc::{self, VerblunskySeq};
use crate::report::{head_tail_medians, AsymptoticsReport, ReportRow};
use crate::spec::{self, Source};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Standing bound on `|moment route − Fredholm route|`.
pub const ROUTE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Szego,
    ArcLimit,
    Compare,
    Weak,
    Cumulants,
    RightLimit,
    Clt,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Szego => "szego",
            Self::ArcLimit => "arc_limit",
            Self::Compare => "compare",
            Self::Weak => "weak",
            Self::Cumulants => "cumulants",
            Self::RightLimit => "right_limit",
            Self::Clt => "clt",
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use clap::ValueEnum;
        Self::value_variants()
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub measure: String,
    /// Second source for `compare`.
    pub other: Option<String>,
    pub h: String,
    pub n_list: Vec<usize>,
    /// Extra CMV rows beyond `n`; `None` picks `max(64, pad_min)`.
    pub pad: Option<usize>,
    /// Bound on the last row's `abs_error`, when set.
    pub tol: Option<f64>,
    /// Scale for `clt` and `cumulants`.
    pub t: f64,
    /// Highest cumulant order (`cumulants`) or the order reported (`right_limit`).
    pub order: usize,
    /// Subsequence for `right_limit`.
    pub subseq: Vec<usize>,
    pub quad_points: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, measure: &str, h: &str, n_list: Vec<usize>) -> Self {
        Self {
            experiment,
            measure: measure.to_string(),
            other: None,
            h: h.to_string(),
            n_list,
            pad: None,
            tol: None,
            t: 0.1,
            order: match experiment {
                Experiment::RightLimit => 1,
                _ => 4,
            },
            subseq: vec![64, 128, 256],
            quad_points: None,
        }
    }

    fn source(&self, spec: &str) -> Result<Source> {
        let s = spec::parse_source(spec)?;
        Ok(match self.quad_points {
            Some(m) => s.with_quad_points(m),
            None => s,
        })
    }

    fn pad_for(&self, h: &TrigPoly) -> Result<usize> {
        let need = cmv::pad_min(h);
        match self.pad {
            Some(p) if p < need => Err(Error::Truncation(format!(
                "pad {p} is below the minimum {need} for this symbol"
            ))),
            Some(p) => Ok(p),
            None => Ok(need.max(64)),
        }
    }
}

/// `log Ψ_n` along both routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogPsi {
    pub n: usize,
    pub fredholm: Complex64,
    pub moment: Complex64,
}

impl LogPsi {
    pub fn disagreement(&self) -> f64 {
        (self.fredholm.exp() - self.moment.exp()).norm()
    }
}

/// Verblunsky coefficients for the Fredholm route and the measure for the moment route.
pub fn prepare(source: &Source, count: usize) -> Result<(VerblunskySeq, CircleMeasure)> {
    match source {
        Source::Measure(m) => Ok((opuc::verblunsky_from_measure(&m.measure, count)?, m.measure.clone())),
        Source::Sequence(s) => {
            let v = s.take(count)?;
            let quad = opuc::paraorthogonal_quadrature(&v, Complex64::new(1.0, 0.0))?;
            let atoms = quad
                .theta
                .iter()
                .zip(&quad.weight)
                .map(|(&theta, &weight)| Atom { theta, weight })
                .collect();
            Ok((v, CircleMeasure::discrete(atoms)?))
        }
    }
}

/// `log[D_n(e^h dμ)/D_n(dμ)] − ∫ h K_n dμ` for every `n`.
pub fn moment_log_psi(mu: &CircleMeasure, h: &TrigPoly, ns: &[usize]) -> Result<Vec<Complex64>> {
    let ratio = opuc::log_det_ratio_sweep(mu, h, ns)?;
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let quad = mu.quadrature();
    let basis = opuc::node_basis(&quad, n_max)?;
    Ok(ns
        .iter()
        .zip(ratio)
        .map(|(&n, r)| r - opuc::kernel_diag_trace_quadrature(&basis, &quad.theta, h, n))
        .collect())
}

/// Both routes for every `n` in `ns`; the Fredholm determinants run in parallel.
pub fn log_psi_routes(source: &Source, h: &TrigPoly, ns: &[usize], pad: usize) -> Result<Vec<LogPsi>> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let (v, mu) = prepare(source, n_max + pad)?;
    let fredholm: Vec<Complex64> = ns
        .par_iter()
        .map(|&n| cmv::log_psi(&v, h, n, pad))
        .collect::<Result<_>>()?;
    let moment = moment_log_psi(&mu, h, ns)?;
    Ok(ns
        .iter()
        .zip(fredholm.into_iter().zip(moment))
        .map(|(&n, (f, m))| LogPsi {
            n,
            fredholm: f,
            moment: m,
        })
        .collect())
}

fn finish_rows(report: &mut AsymptoticsReport, cfg: &ExperimentConfig) {
    let worst = report
        .rows
        .iter()
        .map(|r| r.route_disagreement)
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max);
    if report.experiment != "right_limit" {
        report.check(
            "route disagreement",
            worst <= ROUTE_TOLERANCE,
            format!("max |moment - fredholm| = {worst:.3e} (bound {ROUTE_TOLERANCE:e})"),
        );
    }
    if let (Some(tol), Some(last)) = (cfg.tol, report.rows.last()) {
        report.check(
            "final error",
            last.abs_error <= tol,
            format!("abs_error {:.3e} at n = {} (bound {tol:e})", last.abs_error, last.n),
        );
    }
}

/// Tail-median of the error column below its head-median.
fn check_tail_decrease(report: &mut AsymptoticsReport, what: &str) {
    let errs = report.errors();
    match head_tail_medians(&errs) {
        Some((head, tail)) => report.check(
            &format!("{what} decreases over the tail"),
            tail < head,
            format!("head median {head:.3e}, tail median {tail:.3e}"),
        ),
        None => report.check(
            &format!("{what} decreases over the tail"),
            true,
            "fewer than six rows; not evaluated".into(),
        ),
    }
}

fn psi_rows(routes: &[LogPsi], predicted: Complex64) -> Vec<ReportRow> {
    routes
        .iter()
        .map(|r| {
            let psi = r.moment.exp();
            ReportRow {
                n: r.n,
                psi,
                predicted,
                abs_error: (psi - predicted).norm(),
                route_disagreement: r.disagreement(),
            }
        })
        .collect()
}

fn common_meta(report: &mut AsymptoticsReport, cfg: &ExperimentConfig, h: &TrigPoly, pad: usize) {
    report.meta("measure", &cfg.measure);
    report.meta("h", &cfg.h);
    report.meta("h_coefficients", h);
    report.meta("n_list", &cfg.n_list);
    report.meta("pad", pad);
}

pub fn run_szego(cfg: &ExperimentConfig) -> Result<AsymptoticsReport> {
    let h = spec::parse_h(&cfg.h)?;
    let source = cfg.source(&cfg.measure)?;
    let pad = cfg.pad_for(&h)?;
    let routes = log_psi_routes(&source, &h, &cfg.n_list, pad)?;
    let sum = h.szego_sum();
    let mut report = AsymptoticsReport::new("szego");
    common_meta(&mut report, cfg, &h, pad);
    report.meta_complex("szego_sum", sum);
    report.rows = psi_rows(&routes, sum.exp());
    check_tail_decrease(&mut report, "error");
    finish_rows(&mut report, cfg);
    Ok(report)
}

fn limit_geometry(source: &Source) -> Result<ArcGeometry> {
    let alpha = source.limit_alpha().ok_or_else(|| {
        Error::Domain("the source has no known limiting Verblunsky coefficient".into())
    })?;
    ArcGeometry::new(alpha)
}

pub fn run_arc_limit(cfg: &ExperimentConfig) -> Result<AsymptoticsReport> {
    let h = spec::parse_h(&cfg.h)?;
    let source = cfg.source(&cfg.measure)?;
    let geom = limit_geometry(&source)?;
    let pad = cfg.pad_for(&h)?;
    let mut report = AsymptoticsReport::new("arc_limit");
    common_meta(&mut report, cfg, &h, pad);
    report.meta_complex("alpha", geom.alpha);

    let q = arc::q_alpha(&geom, &h)?;
    report.meta_complex("q_alpha", q);
    if h.is_real_symbol(1e-14) {
        let (a1, b1) = arc::ab_symbols(&geom, &h)?;
        let (a2, b2) = arc::ab_symbols_sampled(&geom, &h, arc::default_sampling_grid(&h))?;
        let q2 = arc::q_from_ab(&a2, &b2);
        report.meta_complex("q_alpha_sampled", q2);
        let d = a1.max_abs_diff(&a2).max(b1.max_abs_diff(&b2)).max((q - q2).norm());
        report.check(
            "Q routes agree",
            d <= 1e-10,
            format!("Chebyshev vs sampling: {d:.3e} (bound 1e-10)"),
        );
    }
    if geom.abs_alpha() >= arc::MIN_ALPHA_FOR_SPLIT {
        let t = arc::default_commutator_size(&h);
        let tr = arc::trace_commutator(&geom, &h, t)?;
        report.meta_complex("half_trace_commutator", tr.numerical / 2.0);
        report.meta("commutator_size", t);
        let d = (tr.numerical / 2.0 - q).norm();
        report.check(
            "half commutator trace matches Q",
            d <= 1e-5,
            format!("|Tr[U,L]/2 - Q| = {d:.3e} at T = {t} (bound 1e-5)"),
        );
    }

    let routes = log_psi_routes(&source, &h, &cfg.n_list, pad)?;
    report.rows = psi_rows(&routes, q.exp());
    finish_rows(&mut report, cfg);
    Ok(report)
}

pub fn run_compare(cfg: &ExperimentConfig) -> Result<AsymptoticsReport> {
    let h = spec::parse_h(&cfg.h)?;
    let other_spec = cfg
        .other
        .as_deref()
        .ok_or_else(|| Error::Parse("compare needs a second source".into()))?;
    let a = cfg.source(&cfg.measure)?;
    let b = cfg.source(other_spec)?;
    let pad = cfg.pad_for(&h)?;
    let ra = log_psi_routes(&a, &h, &cfg.n_list, pad)?;
    let rb = log_psi_routes(&b, &h, &cfg.n_list, pad)?;
    let mut report = AsymptoticsReport::new("compare");
    common_meta(&mut report, cfg, &h, pad);
    report.meta("other", other_spec);
    report.rows = ra
        .iter()
        .zip(&rb)
        .map(|(x, y)| {
            let psi = x.moment.exp();
            let predicted = y.moment.exp();
            ReportRow {
                n: x.n,
                psi,
                predicted,
                abs_error: (psi - predicted).norm(),
                route_disagreement: x.disagreement().max(y.disagreement()),
            }
        })
        .collect();
    check_tail_decrease(&mut report, "difference");
    finish_rows(&mut report, cfg);
    Ok(report)
}

/// `max Im h − min Im h < π` on a fine grid.
pub fn is_sectorial(h: &TrigPoly) -> bool {
    let s = h.samples(arc::default_sampling_grid(h).max(1024));
    let (lo, hi) = s
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.im), hi.max(z.im)));
    hi - lo < std::f64::consts::PI
}

pub fn run_weak(cfg: &ExperimentConfig) -> Result<AsymptoticsReport> {
    let h = spec::parse_h(&cfg.h)?;
    if !is_sectorial(&h) {
        return Err(Error::Domain(
            "e^h is not sectorial: the range of Im h spans at least pi".into(),
        ));
    }
    let source = cfg.source(&cfg.measure)?;
    let pad = cfg.pad_for(&h)?;
    let routes = log_psi_routes(&source, &h, &cfg.n_list, pad)?;
    let mut report = AsymptoticsReport::new("weak");
    common_meta(&mut report, cfg, &h, pad);
    let one = Complex64::new(1.0, 0.0);
    report.rows = routes
        .iter()
        .map(|r| {
            let nf = r.n as f64;
            let psi = (r.moment / nf).exp();
            ReportRow {
                n: r.n,
                psi,
                predicted: one,
                abs_error: (psi - one).norm(),
                route_disagreement: (psi - (r.fredholm / nf).exp()).norm(),
            }
        })
        .collect();
    check_tail_decrease(&mut report, "|psi^(1/n) - 1|");
    finish_rows(&mut report, cfg);
    Ok(report)
}

/// `Σ_{m=1}^{order} t^{m+1} E_m^{(n)}`.
pub fn cumulant_polynomial(e: &[Complex64], t: f64) -> Complex64 {
    e.iter()
        .enumerate()
        .map(|(i, &em)| em * t.powi(i as i32 + 2))
        .sum()
}

/// `E_1..E_order` at size `n` for the coefficients `v`.
pub fn cumulants(v: &VerblunskySeq, h: &TrigPoly, n: usize, order: usize) -> Result<Vec<Complex64>> {
    (1..=order)
        .into_par_iter()
        .map(|m| cmv::cumulant_e(v, h, n, m))
        .collect()
}

/// The order-`(order + 2)` remainder test: `R(t) / R(t/2)` should be near `2^{order+2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemainderRatio {
    pub remainder_t: f64,
    pub remainder_half: f64,
    pub ratio: f64,
    pub expected: f64,
}

impl RemainderRatio {
    /// Within a factor 4 of the expected ratio.
    pub fn passes(&self) -> bool {
        self.ratio.is_finite() && self.ratio >= self.expected / 4.0 && self.ratio <= self.expected * 4.0
    }
}

pub fn run_cumulants(cfg: &ExperimentConfig) -> Result<AsymptoticsReport> {
    if cfg.order == 0 || cfg.order > cmv::MAX_CUMULANT_ORDER {
        return Err(Error::UnsupportedOrder(cfg.order));
    }
    let h = spec::parse_h(&cfg.h)?;
    let source = cfg.source(&cfg.measure)?;
    let pad = cfg.pad_for(&h)?;
    let n_max = *cfg.n_list.last().unwrap_or(&0);
    let need = n_max + 2 * h.effective_degree() * (cfg.order + 2) + 2;
    let (v, _) = prepare(&source, (n_max + pad).max(need))?;
    let t = cfg.t;
    let at_t = log_psi_routes(&source, &h.scale(t), &cfg.n_list, pad)?;
    let at_half = log_psi_routes(&source, &h.scale(t / 2.0), &cfg.n_list, pad)?;

    let mut report = AsymptoticsReport::new("cumulants");
    common_meta(&mut report, cfg, &h, pad);
    report.meta("t", t);
    report.meta("order", cfg.order);
    let mut table = Vec::new();
    let mut ratios = Vec::new();
    for ((r, rh), &n) in at_t.iter().zip(&at_half).zip(&cfg.n_list) {
        let e = cumulants(&v, &h, n, cfg.order)?;
        let poly = cumulant_polynomial(&e, t);
        let rem_t = (r.fredholm - poly).norm();
        let rem_h = (rh.fredholm - cumulant_polynomial(&e, t / 2.0)).norm();
        let rr = RemainderRatio {
            remainder_t: rem_t,
            remainder_half: rem_h,
            ratio: rem_t / rem_h,
            expected: 2f64.powi(cfg.order as i32 + 2),
        };
        table.push(serde_json::json!({
            "n": n,
            "e": e.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "remainder_t": rem_t,
            "remainder_half_t": rem_h,
            "ratio": rr.ratio,
        }));
        ratios.push((n, rr));
        report.rows.push(ReportRow {
            n,
            psi: r.fredholm,
            predicted: poly,
            abs_error: rem_t,
            route_disagreement: (r.fredholm - r.moment).norm(),
        });
    }
    report.meta("cumulants", table);
    for (n, rr) in ratios {
        report.check(
            &format!("remainder ratio at n = {n}"),
            rr.passes(),
            format!(
                "R(t)/R(t/2) = {:.3} (expected {} within a factor 4; R(t) = {:.3e})",
                rr.ratio, rr.expected, rr.remainder_t
            ),
        );
    }
    finish_rows(&mut report, cfg);
    Ok(report)
}

pub fn run_right_limit(cfg: &ExperimentConfig) -> Result<AsymptoticsReport> {
    let h = spec::parse_h(&cfg.h)?;
    let Source::Sequence(seq) = cfg.source(&cfg.measure)? else {
        return Err(Error::Domain("right_limit needs a coefficient sequence".into()));
    };
    let m = cfg.order;
    if m == 0 || m > cmv::MAX_CUMULANT_ORDER {
        return Err(Error::UnsupportedOrder(m));
    }
    let big_m_max = *cfg.n_list.last().unwrap_or(&1);
    let window = 2 * big_m_max + 1;
    let sub_max = cfg.subseq.iter().copied().max().unwrap_or(0);
    let e_need = 2 * h.effective_degree() * (m + 2) + 2;
    let v = seq.take(sub_max + window.max(e_need) + 1)?;
    let beta: RightLimit = cmv::right_limit(&v, &cfg.subseq, window)?;
    let n_j = *beta.subseq.last().expect("right_limit returns a usable index");
    let e_n = cmv::cumulant_e(&v, &h, n_j, m)?;

    let mut report = AsymptoticsReport::new("right_limit");
    common_meta(&mut report, cfg, &h, 0);
    report.meta("order", m);
    report.meta("subsequence", &beta.subseq);
    report.meta("window", window);
    report.meta("max_residual", beta.residual.iter().copied().fold(0.0, f64::max));
    report.meta_complex("e_m_at_last_index", e_n);
    report.meta("last_index", n_j);

    let rows: Vec<(usize, Complex64, Complex64)> = cfg
        .n_list
        .par_iter()
        .map(|&bm| {
            let f = cmv::f_m_truncated(&beta, &h, m, bm)?;
            let f2 = cmv::f_m_truncated(&beta, &h, m, 2 * bm)?;
            Ok((bm, f, f2))
        })
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for (bm, f, f2) in rows {
        let d = (f - f2).norm();
        worst = worst.max(d);
        report.rows.push(ReportRow {
            n: bm,
            psi: f,
            predicted: e_n,
            abs_error: (f - e_n).norm(),
            route_disagreement: d,
        });
    }
    report.check(
        "F_m stable under M-doubling",
        worst <= 1e-12,
        format!("max |F_m(M) - F_m(2M)| = {worst:.3e} (bound 1e-12)"),
    );
    finish_rows(&mut report, cfg);
    Ok(report)
}

pub fn run_clt(cfg: &ExperimentConfig) -> Result<AsymptoticsReport> {
    let f = spec::parse_h(&cfg.h)?;
    if !f.is_real_symbol(1e-14) {
        return Err(Error::Domain("clt needs a real test function".into()));
    }
    let source = cfg.source(&cfg.measure)?;
    let geom = limit_geometry(&source)?;
    let t = cfg.t;
    let h = f.scale(Complex64::new(0.0, t));
    let pad = cfg.pad_for(&h)?;
    let q = arc::q_alpha(&geom, &f)?;
    let predicted = (-t * t * q).exp();
    let mut report = AsymptoticsReport::new("clt");
    common_meta(&mut report, cfg, &f, pad);
    report.meta("t", t);
    report.meta_complex("alpha", geom.alpha);
    report.meta_complex("q_alpha", q);
    let routes = if t == 0.0 {
        cfg.n_list
            .iter()
            .map(|&n| LogPsi {
                n,
                fredholm: ZERO,
                moment: ZERO,
            })
            .collect()
    } else {
        log_psi_routes(&source, &h, &cfg.n_list, pad)?
    };
    report.rows = psi_rows(&routes, predicted);
    finish_rows(&mut report, cfg);
    Ok(report)
}

pub fn run(cfg: &ExperimentConfig) -> Result<AsymptoticsReport> {
    let start = Instant::now();
    let mut report = match cfg.experiment {
        Experiment::Szego => run_szego(cfg),
        Experiment::ArcLimit => run_arc_limit(cfg),
        Experiment::Compare => run_compare(cfg),
        Experiment::Weak => run_weak(cfg),
        Experiment::Cumulants => run_cumulants(cfg),
        Experiment::RightLimit => run_right_limit(cfg),
        Experiment::Clt => run_clt(cfg),
    }?;
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}
