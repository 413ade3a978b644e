//! Exact classification of pretty good state transfer in the oriented
//! triangle with a star of `m` leaves rooted at each vertex.

use std::io::{self, Write};

use num_integer::Roots;
use num_rational::BigRational;
use serde::Serialize;

use crate::number::{rat, square_free_part, Surd};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StarCase {
    #[serde(rename = "coprime")]
    Coprime,
    #[serde(rename = "non-square-s")]
    NonSquareS,
    #[serde(rename = "27k^2")]
    TwentySevenKSquared,
    #[serde(rename = "27k^2+27k+6")]
    TwentySevenKSquaredPlus,
    #[serde(rename = "none")]
    None,
}

impl StarCase {
    pub fn as_str(self) -> &'static str {
        match self {
            StarCase::Coprime => "coprime",
            StarCase::NonSquareS => "non-square-s",
            StarCase::TwentySevenKSquared => "27k^2",
            StarCase::TwentySevenKSquaredPlus => "27k^2+27k+6",
            StarCase::None => "none",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StarVerdict {
    pub m: u64,
    pub case: StarCase,
    pub pgst: bool,
    /// `m / 3` when `3 | m`.
    pub s: Option<u64>,
    /// `√s` or `√(4s+1)`, whichever is an integer.
    pub h: Option<u64>,
    pub k: Option<u64>,
}

impl StarVerdict {
    pub const CSV_HEADER: &'static str = "m,case,pgst,s,h,k";

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.m,
            self.case.as_str(),
            self.pgst,
            opt(self.s),
            opt(self.h),
            opt(self.k)
        )
    }
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// `k ≥ 0` with `27k² + 27k + 6 = m`.
fn solve_27k2_27k_6(m: u64) -> Option<u64> {
    // 108m + 81 = (54k + 27)²
    let disc = 108u128 * m as u128 + 81;
    let r = (disc as f64).sqrt() as u128;
    let r = (r.saturating_sub(2)..=r + 2).find(|x| x * x == disc)?;
    ((r >= 27) && (r - 27) % 54 == 0).then(|| ((r - 27) / 54) as u64)
}

/// Checks the four conditions in order.
///
/// # Panics
/// If `m == 0`.
pub fn classify_star_m(m: u64) -> StarVerdict {
    assert!(m >= 1, "m must be positive");
    let s = m.is_multiple_of(3).then_some(m / 3);
    let h = s.and_then(|s| exact_sqrt(s).or_else(|| exact_sqrt(4 * s + 1)));
    let verdict = |case, k| StarVerdict {
        m,
        case,
        pgst: case != StarCase::None,
        s,
        h,
        k,
    };
    if !m.is_multiple_of(3) {
        return verdict(StarCase::Coprime, None);
    }
    if h.is_none() {
        return verdict(StarCase::NonSquareS, None);
    }
    if m.is_multiple_of(27) {
        if let Some(k) = exact_sqrt(m / 27) {
            return verdict(StarCase::TwentySevenKSquared, Some(k));
        }
    }
    if let Some(k) = solve_27k2_27k_6(m) {
        return verdict(StarCase::TwentySevenKSquaredPlus, Some(k));
    }
    verdict(StarCase::None, None)
}

pub fn write_csv<W: Write>(verdicts: &[StarVerdict], mut w: W) -> io::Result<()> {
    writeln!(w, "{}", StarVerdict::CSV_HEADER)?;
    for v in verdicts {
        writeln!(w, "{}", v.csv_row())?;
    }
    Ok(())
}

/// Eigenvalue support of a non-pendant vertex and quarrels (in turns) to the
/// next vertex of the triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct StarSupport {
    /// `√m, -√m, (√3+√(3+4m))/2, (√3-√(3+4m))/2, (-√3+√(3+4m))/2, (-√3-√(3+4m))/2`
    pub values: Vec<Surd>,
    /// `0, 0, 1/3, 1/3, 2/3, 2/3`
    pub turns: Vec<BigRational>,
}

pub fn star_support_surds(m: u64) -> StarSupport {
    assert!(m >= 1, "m must be positive");
    let root_m = {
        let (sf, k) = square_free_part(m);
        Surd::sqrt_scaled(BigRational::from_integer(k.into()), sf)
    };
    let r3 = Surd::sqrt_scaled(rat(1, 2), 3);
    let r = {
        let (sf, k) = square_free_part(3 + 4 * m);
        Surd::sqrt_scaled(BigRational::from_integer(k.into()) * rat(1, 2), sf)
    };
    let values = vec![
        root_m.clone(),
        -&root_m,
        &r3 + &r,
        &r3 - &r,
        &(-&r3) + &r,
        &(-&r3) - &r,
    ];
    let turns = vec![rat(0, 1), rat(0, 1), rat(1, 3), rat(1, 3), rat(2, 3), rat(2, 3)];
    StarSupport { values, turns }
}
