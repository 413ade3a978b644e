//! Named graph families from JSON or short command-line names, with the
//! exact spectrum when it is known in closed form.

use std::str::FromStr;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{
    c4_tensor_construction, c4_tensor_spectrum, hypercube_spectrum, one_way_family_4,
    one_way_family_8, oriented_hypercube, oriented_k3, oriented_to_hermitian, rooted_looped_path_product,
    rooted_star_product, star_exact_spectrum, upst_circulant, ConstructionError, LoopedPathProduct,
    OrientedGraph,
};
use crate::linalg::HermitianMatrix;
use crate::number::surd::parse_rational;
use crate::number::Surd;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("unknown family {0:?}")]
    Unknown(String),
    #[error("bad parameter {0:?}: {1}")]
    BadParameter(String, String),
    #[error("bad family JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

fn zero() -> String {
    "0".into()
}

fn one() -> String {
    "1".into()
}

fn three() -> usize {
    3
}

fn h_one() -> i64 {
    1
}

fn default_gamma() -> String {
    "gamma=pi".into()
}

fn sqrt2() -> String {
    "sqrt2".into()
}

fn two() -> usize {
    2
}

/// Parameters of a UPST circulant; all fields default to the `n = 3` example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirculantParams {
    #[serde(default = "three")]
    pub n: usize,
    #[serde(default = "zero")]
    pub alpha: String,
    #[serde(default = "one")]
    pub beta: String,
    #[serde(default = "h_one")]
    pub h: i64,
    /// Defaults to all zeros.
    #[serde(default)]
    pub c: Vec<i64>,
}

impl Default for CirculantParams {
    fn default() -> Self {
        CirculantParams {
            n: 3,
            alpha: zero(),
            beta: one(),
            h: 1,
            c: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    OrientedK3,
    OrientedGraph { n: usize, arcs: Vec<(usize, usize)> },
    /// The oriented `(2m+1)`-cube.
    Hypercube { m: u32 },
    /// C4-tensor construction over the oriented `(2m+1)`-cube.
    C4Tensor { m: u32 },
    /// Oriented triangle with a star of `m` leaves at every vertex.
    Star { m: usize },
    LoopedPath {
        #[serde(default = "two")]
        m: usize,
        #[serde(default = "default_gamma")]
        gamma: String,
        #[serde(flatten)]
        base: CirculantParams,
    },
    #[serde(rename = "one_way_4")]
    OneWay4 {
        #[serde(default = "sqrt2")]
        lambda: String,
    },
    #[serde(rename = "one_way_8")]
    OneWay8 {
        #[serde(default = "sqrt2")]
        theta: String,
    },
    UpstCirculant(CirculantParams),
}

/// Looped-path data needed by the exact PGST check.
#[derive(Clone, Debug)]
pub struct LoopedPathInfo {
    pub product: LoopedPathProduct,
    pub theta: Vec<BigRational>,
    pub gamma: Surd,
}

#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub matrix: HermitianMatrix,
    /// Distinct eigenvalues in closed form (any order).
    pub exact: Option<Vec<Surd>>,
    pub looped: Option<LoopedPathInfo>,
    pub notes: Vec<String>,
}

impl Family {
    fn new(name: impl Into<String>, matrix: HermitianMatrix, exact: Option<Vec<Surd>>) -> Self {
        Family {
            name: name.into(),
            matrix,
            exact,
            looped: None,
            notes: Vec::new(),
        }
    }
}

fn k3_spectrum() -> Vec<Surd> {
    vec![-Surd::sqrt(3), Surd::zero(), Surd::sqrt(3)]
}

fn rational_param(s: &str) -> Result<BigRational, FamilyError> {
    parse_rational(s).map_err(|e| FamilyError::BadParameter(s.into(), e))
}

impl CirculantParams {
    fn offsets(&self) -> Vec<i64> {
        if self.c.is_empty() {
            vec![0; self.n]
        } else {
            self.c.clone()
        }
    }

    fn build(&self) -> Result<(HermitianMatrix, Vec<BigRational>), FamilyError> {
        let alpha = rational_param(&self.alpha)?;
        let beta = rational_param(&self.beta)?;
        let u = upst_circulant(self.n, &alpha, &beta, self.h, &self.offsets())?;
        Ok((u.matrix, u.eigenvalues))
    }
}

impl FamilySpec {
    pub fn from_json(s: &str) -> Result<Self, FamilyError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn build(&self) -> Result<Family, FamilyError> {
        Ok(match self {
            FamilySpec::OrientedK3 => Family::new(
                "oriented-k3",
                oriented_to_hermitian(&oriented_k3()),
                Some(k3_spectrum()),
            ),
            FamilySpec::OrientedGraph { n, arcs } => {
                let g = OrientedGraph::new(*n, arcs.iter().copied())?;
                Family::new("oriented-graph", oriented_to_hermitian(&g), None)
            }
            FamilySpec::Hypercube { m } => Family::new(
                format!("hypercube:{m}"),
                oriented_to_hermitian(&oriented_hypercube(*m)?),
                Some(hypercube_spectrum(*m)),
            ),
            FamilySpec::C4Tensor { m } => {
                let hx = oriented_to_hermitian(&oriented_hypercube(*m)?);
                Family::new(
                    format!("c4-tensor:{m}"),
                    c4_tensor_construction(&hx)?,
                    Some(c4_tensor_spectrum(&hypercube_spectrum(*m))),
                )
            }
            FamilySpec::Star { m } => {
                let hx = oriented_to_hermitian(&oriented_k3());
                let star = rooted_star_product(&hx, *m)?;
                let mut f = Family::new(
                    format!("star:{m}"),
                    star.matrix,
                    star_exact_spectrum(&k3_spectrum(), *m),
                );
                f.notes.push(format!(
                    "vertex v·{} + p is leaf p of the star at triangle vertex v (p = 0 is the root)",
                    m + 1
                ));
                f
            }
            FamilySpec::LoopedPath { m, gamma, base } => {
                let (hx, theta) = base.build()?;
                let gamma = parse_param(gamma)?;
                let product = rooted_looped_path_product(&hx, *m, gamma.to_f64())?;
                let mut f = Family::new(format!("looped-path:{m}"), product.matrix.clone(), None);
                f.notes.push(format!(
                    "vertex p·{} + x is base vertex x at path position p (p = 0 carries the loop)",
                    base.n
                ));
                f.looped = Some(LoopedPathInfo {
                    product,
                    theta,
                    gamma,
                });
                f
            }
            FamilySpec::OneWay4 { lambda } => {
                let l = parse_param(lambda)?;
                let fam = one_way_family_4(&l)?;
                Family::new("one-way-4", fam.matrix, Some(fam.spectrum))
            }
            FamilySpec::OneWay8 { theta } => {
                let t = parse_param(theta)?;
                let fam = one_way_family_8(&t)?;
                Family::new("one-way-8", fam.matrix, Some(fam.spectrum))
            }
            FamilySpec::UpstCirculant(p) => {
                let (h, theta) = p.build()?;
                Family::new(
                    format!("upst-circulant:{}", p.n),
                    h,
                    Some(theta.into_iter().map(Surd::rational).collect()),
                )
            }
        })
    }
}

fn parse_num<T: FromStr>(name: &str, s: &str) -> Result<T, FamilyError> {
    s.parse()
        .map_err(|_| FamilyError::BadParameter(s.into(), format!("expected an integer for {name}")))
}

/// Short names: `oriented-k3`, `hypercube:m`, `c4-tensor:m`, `star:m`,
/// `looped-path[:m]`, `one-way-4`, `one-way-8`, `upst-circulant[:n]`.
/// Anything starting with `{` is read as JSON.
impl FromStr for FamilySpec {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.starts_with('{') {
            return FamilySpec::from_json(s);
        }
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let need = |what: &str| {
            arg.ok_or_else(|| FamilyError::BadParameter(s.into(), format!("expected {name}:{what}")))
        };
        Ok(match name {
            "oriented-k3" => FamilySpec::OrientedK3,
            "hypercube" => FamilySpec::Hypercube {
                m: parse_num("m", need("m")?)?,
            },
            "c4-tensor" => FamilySpec::C4Tensor {
                m: parse_num("m", need("m")?)?,
            },
            "star" => FamilySpec::Star {
                m: parse_num("m", need("m")?)?,
            },
            "looped-path" => FamilySpec::LoopedPath {
                m: arg.map(|a| parse_num("m", a)).transpose()?.unwrap_or(2),
                gamma: default_gamma(),
                base: CirculantParams::default(),
            },
            "one-way-4" => FamilySpec::OneWay4 { lambda: sqrt2() },
            "one-way-8" => FamilySpec::OneWay8 { theta: sqrt2() },
            "upst-circulant" => FamilySpec::UpstCirculant(CirculantParams {
                n: arg.map(|a| parse_num("n", a)).transpose()?.unwrap_or(3),
                ..CirculantParams::default()
            }),
            _ => return Err(FamilyError::Unknown(s.into())),
        })
    }
}

/// Parses an exact parameter: sums of terms like `3/2`, `sqrt5`, `2*sqrt(3)`,
/// `pi`, `pi/2`. `name=expr` makes a transcendental tag `name` whose numeric
/// value is that of `expr`.
pub fn parse_param(s: &str) -> Result<Surd, FamilyError> {
    let bad = |why: &str| FamilyError::BadParameter(s.into(), why.into());
    let t: String = s
        .trim()
        .replace('\u{2212}', "-")
        .replace('π', "pi")
        .replace('√', "sqrt")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if let Some((name, expr)) = t.split_once('=') {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad("tag names are alphanumeric"));
        }
        let value = parse_param(expr)?.to_f64();
        return Ok(Surd::symbol(name, value));
    }
    if t.is_empty() {
        return Err(bad("empty expression"));
    }
    // split into signed terms, keeping signs that follow an operator
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in t.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with(['*', '/']) {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut total = Surd::zero();
    for term in &terms {
        total = &total + &parse_term(term).map_err(|e| bad(&e))?;
    }
    Ok(total)
}

fn parse_term(term: &str) -> Result<Surd, String> {
    let (sign, body) = match term.strip_prefix('-') {
        Some(b) => (-BigRational::one(), b),
        None => (BigRational::one(), term.strip_prefix('+').unwrap_or(term)),
    };
    let mut scale = sign;
    let mut atom: Option<Surd> = None;
    for factor in body.split('*') {
        let (head, dens) = match factor.split_once('/') {
            Some((h, d)) if !is_integer(h) => (h, Some(d)),
            _ => (factor, None),
        };
        if let Some(d) = dens {
            for den in d.split('/') {
                scale /= parse_rational(den)?;
            }
        }
        match parse_atom(head)? {
            Atom::Rational(q) => scale *= q,
            Atom::Surd(x) => {
                if atom.replace(x).is_some() {
                    return Err("products of two irrational factors are not supported".into());
                }
            }
        }
    }
    Ok(match atom {
        Some(x) => x.scale(&scale),
        None => Surd::rational(scale),
    })
}

fn is_integer(s: &str) -> bool {
    !s.is_empty() && s.trim_start_matches('-').chars().all(|c| c.is_ascii_digit())
}

enum Atom {
    Rational(BigRational),
    Surd(Surd),
}

fn parse_atom(s: &str) -> Result<Atom, String> {
    if s == "pi" {
        return Ok(Atom::Surd(Surd::pi()));
    }
    if let Some(rest) = s.strip_prefix("sqrt") {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(rest);
        let n: u64 = inner.parse().map_err(|_| format!("bad radicand {inner:?}"))?;
        return Ok(Atom::Surd(Surd::sqrt(n)));
    }
    if s.contains('.') {
        // decimals are exact rationals
        let v: f64 = s.parse().map_err(|_| format!("bad number {s:?}"))?;
        let q = BigRational::from_float(v).ok_or_else(|| format!("bad number {s:?}"))?;
        return Ok(Atom::Rational(q));
    }
    parse_rational(s).map(Atom::Rational)
}

/// Numeric value of a parameter, for flags that take plain reals.
pub fn param_value(s: &str) -> Result<f64, FamilyError> {
    let v = parse_param(s)?.to_f64();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FamilyError::BadParameter(s.into(), "not finite".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;

    #[test]
    fn params() {
        assert_eq!(parse_param("3/2").unwrap(), Surd::ratio(3, 2));
        assert_eq!(parse_param("sqrt2").unwrap(), Surd::sqrt(2));
        assert_eq!(parse_param("2*sqrt(3)").unwrap(), Surd::sqrt_scaled(rat(2, 1), 3));
        assert_eq!(parse_param("-√12").unwrap(), Surd::sqrt_scaled(rat(-2, 1), 3));
        assert_eq!(
            parse_param("pi/2").unwrap(),
            Surd::pi().scale(&rat(1, 2))
        );
        let s = parse_param("1/2 + sqrt3/2 - 3*pi").unwrap();
        assert_eq!(s.rational_part(), rat(1, 2));
        assert!((s.to_f64() - (0.5 + 3f64.sqrt() / 2.0 - 3.0 * std::f64::consts::PI)).abs() < 1e-12);
        let g = parse_param("gamma=pi").unwrap();
        assert!(g.has_symbols());
        assert_ne!(g, Surd::pi());
        assert!((g.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(parse_param("sqrt2*sqrt3").is_err());
        assert!(parse_param("").is_err());
    }

    #[test]
    fn short_names() {
        assert_eq!("oriented-k3".parse::<FamilySpec>().unwrap(), FamilySpec::OrientedK3);
        assert_eq!(
            "c4-tensor:1".parse::<FamilySpec>().unwrap(),
            FamilySpec::C4Tensor { m: 1 }
        );
        assert!("star".parse::<FamilySpec>().is_err());
        assert!("nope".parse::<FamilySpec>().is_err());
        for name in [
            "oriented-k3",
            "hypercube:1",
            "c4-tensor:0",
            "star:3",
            "looped-path",
            "looped-path:3",
            "one-way-4",
            "one-way-8",
            "upst-circulant",
        ] {
            let f = name.parse::<FamilySpec>().unwrap().build().unwrap();
            assert!(f.matrix.matrix().hermitian_defect() < 1e-10, "{name}");
        }
    }

    #[test]
    fn json_specs() {
        let spec = FamilySpec::from_json(
            r#"{"family":"upst_circulant","n":3,"alpha":"0","beta":"1","h":1,"c":[0,0,0]}"#,
        )
        .unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f.matrix.dim(), 3);
        assert_eq!(f.exact.unwrap().len(), 3);

        let spec = FamilySpec::from_json(r#"{"family":"looped_path","m":3}"#).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f.matrix.dim(), 9);
        assert!(f.looped.unwrap().gamma.has_symbols());

        let spec = FamilySpec::from_json(r#"{"family":"oriented_graph","n":2,"arcs":[[0,1]]}"#).unwrap();
        assert_eq!(spec.build().unwrap().matrix.dim(), 2);

        let spec = FamilySpec::from_json(r#"{"family":"one_way_4","lambda":"lambda=sqrt2"}"#).unwrap();
        assert_eq!(spec.build().unwrap().matrix.dim(), 4);

        assert!(FamilySpec::from_json(r#"{"family":"upst_circulant","n":4,"h":2}"#)
            .unwrap()
            .build()
            .is_err());
        // round trip
        let js = serde_json::to_string(&FamilySpec::Star { m: 2 }).unwrap();
        assert_eq!(js, r#"{"family":"star","m":2}"#);
    }
}
