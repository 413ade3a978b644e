//! Exact Q-linear combinations of square roots and tagged transcendental
//! symbols.
//!
//! A [`Surd`] is `q₀ + Σ qᵢ√dᵢ + Σ pₖ·sₖ` with rational coefficients,
//! distinct square-free `dᵢ > 1`, and named symbols `sₖ` (such as π or a
//! transcendental loop weight). The set `{1, √d₁, √d₂, …}` is linearly
//! independent over Q, so structural equality is numeric equality. Symbols are
//! *assumed* independent of the radicals and of each other; callers that
//! introduce a symbol take responsibility for that assumption.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::square_free_part;

/// A named real constant treated as an independent basis element.
#[derive(Clone, Debug)]
pub struct Symbol {
    pub name: String,
    pub value: f64,
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name.cmp(&other.name)
    }
}

/// Basis element of the Q-vector space a [`Surd`] lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    One,
    /// `√d` for square-free `d > 1`.
    Root(u64),
    Symbol(Symbol),
}

impl Basis {
    pub fn value(&self) -> f64 {
        match self {
            Basis::One => 1.0,
            Basis::Root(d) => (*d as f64).sqrt(),
            Basis::Symbol(s) => s.value,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::One => write!(f, "1"),
            Basis::Root(d) => write!(f, "√{d}"),
            Basis::Symbol(s) => write!(f, "{}", s.name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    // invariant: no zero coefficients
    terms: BTreeMap<Basis, BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn rational(q: BigRational) -> Self {
        Self::term(Basis::One, q)
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(rat(num, den))
    }

    /// `√n`, normalized to `k√s` with `s` square-free.
    pub fn sqrt(n: u64) -> Self {
        Self::sqrt_scaled(BigRational::one(), n)
    }

    /// `q·√n`, normalized.
    pub fn sqrt_scaled(q: BigRational, n: u64) -> Self {
        if n == 0 {
            return Surd::zero();
        }
        let (s, k) = square_free_part(n);
        let coef = q * BigRational::from_integer(k.into());
        if s == 1 {
            Self::rational(coef)
        } else {
            Self::term(Basis::Root(s), coef)
        }
    }

    /// A tagged symbol with numeric value `value`, assumed independent over Q
    /// of every radical and every other symbol.
    pub fn symbol(name: &str, value: f64) -> Self {
        Self::term(
            Basis::Symbol(Symbol {
                name: name.to_string(),
                value,
            }),
            BigRational::one(),
        )
    }

    /// π as a tagged symbol.
    pub fn pi() -> Self {
        Self::symbol("pi", std::f64::consts::PI)
    }

    fn term(b: Basis, q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(b, q);
        }
        Surd { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|b| *b == Basis::One)
    }

    pub fn rational_part(&self) -> BigRational {
        self.coefficient(&Basis::One)
    }

    pub fn coefficient(&self, b: &Basis) -> BigRational {
        self.terms.get(b).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Radical part as `(d, coefficient)` pairs.
    pub fn radical_terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().filter_map(|(b, q)| match b {
            Basis::Root(d) => Some((*d, q)),
            _ => None,
        })
    }

    pub fn symbol_terms(&self) -> impl Iterator<Item = (&Symbol, &BigRational)> {
        self.terms.iter().filter_map(|(b, q)| match b {
            Basis::Symbol(s) => Some((s, q)),
            _ => None,
        })
    }

    pub fn has_symbols(&self) -> bool {
        self.symbol_terms().next().is_some()
    }

    /// All nonzero `(basis, coefficient)` pairs in basis order.
    pub fn components(&self) -> impl Iterator<Item = (&Basis, &BigRational)> {
        self.terms.iter()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Surd::zero();
        }
        Surd {
            terms: self
                .terms
                .iter()
                .map(|(b, c)| (b.clone(), c * q))
                .collect(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(b, q)| q.to_f64().unwrap_or(f64::NAN) * b.value())
            .sum()
    }

    /// `Some(c)` with `self = c·other` when `c` is rational.
    pub fn ratio_to(&self, other: &Surd) -> Option<BigRational> {
        let (pivot, pc) = other.terms.iter().next()?;
        let c = self.coefficient(pivot) / pc;
        (other.scale(&c) == *self).then_some(c)
    }

    fn add_term(&mut self, b: &Basis, q: &BigRational) {
        let zero = {
            let entry = self.terms.entry(b.clone()).or_insert_with(BigRational::zero);
            *entry += q;
            entry.is_zero()
        };
        if zero {
            self.terms.remove(b);
        }
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (b, q) in &rhs.terms {
            out.add_term(b, q);
        }
        out
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        &self + &rhs
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            terms: self.terms.iter().map(|(b, q)| (b.clone(), -q)).collect(),
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        self + &(-rhs)
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        &self - &rhs
    }
}

impl Mul<&BigRational> for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &BigRational) -> Surd {
        self.scale(rhs)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, q)) in self.terms.iter().enumerate() {
            let neg = q.is_negative();
            let mag = q.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            match b {
                Basis::One => write!(f, "{mag}")?,
                _ if mag.is_one() => write!(f, "{b}")?,
                _ => write!(f, "{mag}·{b}")?,
            }
        }
        Ok(())
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim().replace('\u{2212}', "-");
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| format!("bad rational {s:?}: {e}"))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(&s)?)),
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    coef: String,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct SurdJson {
    rat: String,
    terms: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    symbols: BTreeMap<String, SymbolJson>,
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut terms = BTreeMap::new();
        let mut symbols = BTreeMap::new();
        for (b, q) in &self.terms {
            match b {
                Basis::One => {}
                Basis::Root(d) => {
                    terms.insert(d.to_string(), format_rational(q));
                }
                Basis::Symbol(sym) => {
                    symbols.insert(
                        sym.name.clone(),
                        SymbolJson {
                            coef: format_rational(q),
                            value: sym.value,
                        },
                    );
                }
            }
        }
        SurdJson {
            rat: format_rational(&self.rational_part()),
            terms,
            symbols,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Surd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = SurdJson::deserialize(d)?;
        let mut out = Surd::rational(parse_rational(&raw.rat).map_err(D::Error::custom)?);
        for (k, v) in raw.terms {
            let n: u64 = k
                .parse()
                .map_err(|_| D::Error::custom(format!("bad radicand {k:?}")))?;
            let q = parse_rational(&v).map_err(D::Error::custom)?;
            out = &out + &Surd::sqrt_scaled(q, n);
        }
        for (name, v) in raw.symbols {
            let q = parse_rational(&v.coef).map_err(D::Error::custom)?;
            out = &out + &Surd::symbol(&name, v.value).scale(&q);
        }
        Ok(out)
    }
}
