//! Text specifications of measures, coefficient sequences and symbols.
//!
//! Measures: `lebesgue`, `geronimus:<re>[,<im>]`, `fh:<θ>,<α>,<β>[;…]`,
//! `bs:<re>,<im>[;…]`, `perturbed:<base>:<h-file>`, each optionally followed
//! by one or more `+atom:<θ>,<q>`.
//!
//! Sequences: `const:<re>[,<im>]`, `decay:<re>,<im>,<c>` (`α + c/(n+2)`),
//! `sqrt:<re>[,<im>]` (`α(1 − 1/√(n+4))`), `alt:<re>[,<im>]` (`(−1)^n α`),
//! `csv:<path>`.
//!
//! Symbols: a JSON object or file in the [`TrigPoly`] schema, or the
//! shorthand `cos:<a1>,<a2>,…;sin:<b1>,…` with an optional `c:<c0>` part,
//! meaning `c0 + Σ a_j cos jθ + Σ b_j sin jθ`.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::TrigPoly;
use crate::measure::{CircleMeasure, Density, FhSingularity};
use crate::opuc::VerblunskySeq;

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_f64).collect()
}

fn parse_complex(s: &str) -> Result<Complex64> {
    match parse_list(s)?.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(Error::Parse(format!("expected <re>[,<im>], got {s:?}"))),
    }
}

/// Parses a symbol from a JSON object, a JSON file, or the shorthand.
pub fn parse_h(spec: &str) -> Result<TrigPoly> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        return Ok(serde_json::from_str(spec)?);
    }
    if spec.starts_with("cos:") || spec.starts_with("sin:") || spec.starts_with("c:") {
        let mut c0 = 0.0;
        let mut cos = Vec::new();
        let mut sin = Vec::new();
        for part in spec.split(';') {
            let (key, val) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("symbol part {part:?} lacks a key")))?;
            match key.trim() {
                "c" => c0 = parse_f64(val)?,
                "cos" => cos = parse_list(val)?,
                "sin" => sin = parse_list(val)?,
                other => return Err(Error::Parse(format!("unknown symbol key {other:?}"))),
            }
        }
        return Ok(TrigPoly::from_cos_sin(c0, &cos, &sin));
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return Ok(serde_json::from_str(&text)?);
    }
    Err(Error::Parse(format!(
        "symbol {spec:?} is neither JSON, a file, nor cos:/sin: shorthand"
    )))
}

/// A measure together with the constant its Verblunsky coefficients approach, if known.
#[derive(Clone, Debug)]
pub struct MeasureSpec {
    pub measure: CircleMeasure,
    /// `α` with `|α_n| → |α|`, when the catalog knows it.
    pub limit_alpha: Option<Complex64>,
}

pub fn parse_measure(spec: &str) -> Result<MeasureSpec> {
    let mut parts = spec.trim().split("+atom:");
    let base = parts.next().unwrap_or_default();
    let mut out = parse_base_measure(base)?;
    for atom in parts {
        match parse_list(atom)?.as_slice() {
            [theta, q] => out.measure = out.measure.with_atom(*theta, *q)?,
            _ => return Err(Error::Parse(format!("atom needs <θ>,<q>, got {atom:?}"))),
        }
    }
    Ok(out)
}

fn parse_base_measure(spec: &str) -> Result<MeasureSpec> {
    let spec = spec.trim();
    if spec == "lebesgue" {
        return Ok(MeasureSpec {
            measure: CircleMeasure::lebesgue(),
            limit_alpha: Some(Complex64::new(0.0, 0.0)),
        });
    }
    if let Some(rest) = spec.strip_prefix("perturbed:") {
        let (base, file) = rest
            .rsplit_once(':')
            .ok_or_else(|| Error::Parse("perturbed needs <base>:<h-file>".into()))?;
        let inner = parse_measure(base)?;
        let h = parse_h(file)?;
        return Ok(MeasureSpec {
            measure: inner.measure.exp_perturb(&h)?,
            limit_alpha: inner.limit_alpha,
        });
    }
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("unknown measure {spec:?}")))?;
    match kind {
        "geronimus" => {
            let alpha = parse_complex(args)?;
            Ok(MeasureSpec {
                measure: CircleMeasure::geronimus(alpha)?,
                limit_alpha: Some(alpha),
            })
        }
        "fh" => {
            let mut params = Vec::new();
            for item in args.split(';').filter(|s| !s.trim().is_empty()) {
                match parse_list(item)?.as_slice() {
                    [theta, alpha, beta] => params.push(FhSingularity {
                        theta: *theta,
                        alpha: *alpha,
                        beta: *beta,
                    }),
                    _ => return Err(Error::Parse(format!("fh item needs <θ>,<α>,<β>, got {item:?}"))),
                }
            }
            Ok(MeasureSpec {
                measure: CircleMeasure::fisher_hartwig(params)?,
                limit_alpha: Some(Complex64::new(0.0, 0.0)),
            })
        }
        "bs" => {
            let alphas = args
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()?;
            Ok(MeasureSpec {
                measure: CircleMeasure::bernstein_szego(alphas)?,
                limit_alpha: Some(Complex64::new(0.0, 0.0)),
            })
        }
        _ => Err(Error::Parse(format!("unknown measure kind {kind:?}"))),
    }
}

/// A rule producing `α_n` for any `n`, or a fixed list read from CSV.
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSpec {
    Constant(Complex64),
    /// `α + c/(n+2)`.
    Decay(Complex64, f64),
    /// `α(1 − 1/√(n+4))`.
    Sqrt(Complex64),
    /// `(−1)^n α`.
    Alternating(Complex64),
    Fixed(VerblunskySeq),
}

impl SequenceSpec {
    pub fn alpha(&self, n: usize) -> Option<Complex64> {
        let nf = n as f64;
        match self {
            Self::Constant(a) => Some(*a),
            Self::Decay(a, c) => Some(a + c / (nf + 2.0)),
            Self::Sqrt(a) => Some(a * (1.0 - 1.0 / (nf + 4.0).sqrt())),
            Self::Alternating(a) => Some(if n.is_multiple_of(2) { *a } else { -a }),
            Self::Fixed(v) => v.alphas.get(n).copied(),
        }
    }

    /// `α_0..α_{n−1}`; a fixed list shorter than `n` is a range error.
    pub fn take(&self, n: usize) -> Result<VerblunskySeq> {
        let alphas = (0..n)
            .map(|j| {
                self.alpha(j).ok_or_else(|| {
                    Error::Range(format!("sequence has no coefficient {j} (needed {n})"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        VerblunskySeq::new(alphas, 1.0)
    }

    /// The constant whose modulus `|α_n|` approaches, when it exists.
    pub fn limit_alpha(&self) -> Option<Complex64> {
        match self {
            Self::Constant(a) | Self::Decay(a, _) | Self::Sqrt(a) | Self::Alternating(a) => Some(*a),
            Self::Fixed(_) => None,
        }
    }
}

pub fn parse_sequence(spec: &str) -> Result<SequenceSpec> {
    let (kind, args) = spec
        .trim()
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("unknown sequence {spec:?}")))?;
    let checked = |a: Complex64| {
        if a.norm() < 1.0 {
            Ok(a)
        } else {
            Err(Error::Domain(format!("|alpha| = {} is not below 1", a.norm())))
        }
    };
    match kind {
        "const" => Ok(SequenceSpec::Constant(checked(parse_complex(args)?)?)),
        "sqrt" => Ok(SequenceSpec::Sqrt(checked(parse_complex(args)?)?)),
        "alt" => Ok(SequenceSpec::Alternating(checked(parse_complex(args)?)?)),
        "decay" => match parse_list(args)?.as_slice() {
            [re, im, c] => {
                let a = checked(Complex64::new(*re, *im))?;
                if a.norm() + c.abs() / 2.0 >= 1.0 {
                    return Err(Error::Domain("decay sequence leaves the unit disk".into()));
                }
                Ok(SequenceSpec::Decay(a, *c))
            }
            _ => Err(Error::Parse(format!("decay needs <re>,<im>,<c>, got {args:?}"))),
        },
        "csv" => Ok(SequenceSpec::Fixed(VerblunskySeq::read_csv(Path::new(args))?)),
        _ => Err(Error::Parse(format!("unknown sequence kind {kind:?}"))),
    }
}

/// Either kind of input an experiment can be driven by.
#[derive(Clone, Debug)]
pub enum Source {
    Measure(MeasureSpec),
    Sequence(SequenceSpec),
}

impl Source {
    pub fn limit_alpha(&self) -> Option<Complex64> {
        match self {
            Self::Measure(m) => m.limit_alpha,
            Self::Sequence(s) => s.limit_alpha(),
        }
    }

    /// Applies a quadrature resolution to measure sources.
    pub fn with_quad_points(self, m: usize) -> Self {
        match self {
            Self::Measure(mut s) => {
                s.measure = s.measure.with_quad_points(m);
                Self::Measure(s)
            }
            other => other,
        }
    }
}

const SEQUENCE_KINDS: [&str; 5] = ["const:", "decay:", "sqrt:", "alt:", "csv:"];

pub fn parse_source(spec: &str) -> Result<Source> {
    let s = spec.trim();
    if SEQUENCE_KINDS.iter().any(|k| s.starts_with(k)) {
        Ok(Source::Sequence(parse_sequence(s)?))
    } else {
        Ok(Source::Measure(parse_measure(s)?))
    }
}

/// Short label of the density family, for report metadata.
pub fn density_label(mu: &CircleMeasure) -> &'static str {
    match mu.density {
        Density::Uniform => "uniform",
        Density::Geronimus(_) => "geronimus",
        Density::FisherHartwig(_) => "fisher-hartwig",
        Density::BernsteinSzego(_) => "bernstein-szego",
        Density::Zero => "discrete",
    }
}

/// Parses `8,16,32`; the list must be strictly increasing.
pub fn parse_n_list(spec: &str) -> Result<Vec<usize>> {
    let ns = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("not a size: {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parse(format!("{spec:?} is not a strictly increasing list")));
    }
    Ok(ns)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_symbol() {
        let h = parse_h("cos:0.8;sin:0,0.2").unwrap();
        assert!((h.get(1) - Complex64::new(0.4, 0.0)).norm() < 1e-15);
        assert!((h.get(2) - Complex64::new(0.0, -0.1)).norm() < 1e-15);
        let h = parse_h("c:0.5;cos:1").unwrap();
        assert_eq!(h.get(0), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn json_symbol_round_trip() {
        let h = parse_h("cos:0.8;sin:0.3").unwrap();
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(parse_h(&text).unwrap(), h);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.json");
        std::fs::write(&path, &text).unwrap();
        assert_eq!(parse_h(path.to_str().unwrap()).unwrap(), h);
    }

    #[test]
    fn measures() {
        let m = parse_measure("lebesgue+atom:0,0.5").unwrap();
        assert_eq!(m.measure.atoms.len(), 1);
        assert!((m.measure.total_mass() - 1.5).abs() < 1e-12);
        let g = parse_measure("geronimus:0.6,0").unwrap();
        assert_eq!(g.measure.atoms.len(), 1);
        assert_eq!(g.limit_alpha, Some(Complex64::new(0.6, 0.0)));
        let f = parse_measure("fh:3.141592653589793,1,0").unwrap();
        assert!((f.measure.total_mass() - 2.0).abs() < 1e-10);
        assert!(parse_measure("fh:0,1,0.5").is_err());
        assert!(parse_measure("geronimus:1.2").is_err());
        assert!(parse_measure("nonsense").is_err());
    }

    #[test]
    fn perturbed_measure_reads_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.json");
        let h = TrigPoly::constant(2f64.ln());
        std::fs::write(&path, serde_json::to_string(&h).unwrap()).unwrap();
        let spec = format!("perturbed:geronimus:0.5,0:{}", path.display());
        let m = parse_measure(&spec).unwrap();
        let base = CircleMeasure::geronimus(Complex64::new(0.5, 0.0)).unwrap();
        assert!((m.measure.total_mass() - 2.0 * base.total_mass()).abs() < 1e-10);
    }

    #[test]
    fn sequences() {
        let s = parse_sequence("decay:0.5,0,0.4").unwrap();
        assert!((s.alpha(0).unwrap() - Complex64::new(0.7, 0.0)).norm() < 1e-15);
        let a = parse_sequence("alt:0.3").unwrap();
        assert_eq!(a.alpha(1), Some(Complex64::new(-0.3, 0.0)));
        assert!(parse_sequence("const:1.0").is_err());
        assert!(matches!(parse_source("const:0.5").unwrap(), Source::Sequence(_)));
        assert!(matches!(parse_source("lebesgue").unwrap(), Source::Measure(_)));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        VerblunskySeq::constant(Complex64::new(0.2, 0.1), 5)
            .unwrap()
            .write_csv(&path)
            .unwrap();
        let f = parse_sequence(&format!("csv:{}", path.display())).unwrap();
        assert!(f.take(5).is_ok());
        assert!(matches!(f.take(6), Err(Error::Range(_))));
    }

    #[test]
    fn n_lists() {
        assert_eq!(parse_n_list("8, 16,32").unwrap(), vec![8, 16, 32]);
        assert!(parse_n_list("8,8").is_err());
        assert!(parse_n_list("x").is_err());
    }
}
