//! Exact arithmetic used by the certification paths.

pub mod lattice;
pub mod poly2;
pub mod surd;

pub use lattice::{is_relation, relation_lattice, RelationLattice};
pub use poly2::{charpoly_mod2, integer_charpoly, poly_from_roots_mod2, Poly2};
pub use surd::{rat, Basis, Surd, Symbol};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumberError {
    #[error("probe bound {0} exceeds the maximum of {MAX_PROBE_BOUND}")]
    BoundTooLarge(u32),
    #[error("enumeration of {candidates:.3e} vectors exceeds the budget of {PROBE_BUDGET:e}")]
    DimensionTooLarge { candidates: f64 },
}

pub const MAX_PROBE_BOUND: u32 = 50;
/// Cap on the number of integer vectors [`float_relation_probe`] visits.
pub const PROBE_BUDGET: f64 = 5e7;
pub const PROBE_TOL: f64 = 1e-9;

/// Writes `n = s·k²` with `s` square-free. `square_free_part(0)` is `(0, 0)`.
pub fn square_free_part(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut s = 1u64;
    let mut k = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= p;
        }
        if e % 2 == 1 {
            s *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (s * rest, k)
}

/// Exact integer square root, if `n` is a perfect square.
pub fn perfect_sqrt(n: u64) -> Option<u64> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// Exhaustive search for integer vectors `l` with `‖l‖_∞ ≤ bound` and
/// `|Σ l_r v_r| ≤ 1e-9`. Only one of `±l` is reported (first nonzero entry
/// positive). Advisory: floating relations never certify anything.
pub fn float_relation_probe(values: &[f64], bound: u32) -> Result<Vec<Vec<i64>>, NumberError> {
    if bound > MAX_PROBE_BOUND {
        return Err(NumberError::BoundTooLarge(bound));
    }
    let d = values.len();
    let side = 2 * bound as usize + 1;
    let candidates = (side as f64).powi(d as i32);
    if candidates > PROBE_BUDGET {
        return Err(NumberError::DimensionTooLarge { candidates });
    }
    let b = bound as i64;
    let mut found = Vec::new();
    let mut l = vec![-b; d];
    if d == 0 {
        return Ok(found);
    }
    loop {
        let first = l.iter().find(|&&x| x != 0);
        if first.is_some_and(|&x| x > 0) {
            let s: f64 = l.iter().zip(values).map(|(&k, v)| k as f64 * v).sum();
            if s.abs() <= PROBE_TOL {
                found.push(l.clone());
            }
        }
        // odometer
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(found);
            }
            i -= 1;
            if l[i] < b {
                l[i] += 1;
                break;
            }
            l[i] = -b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_free_examples() {
        assert_eq!(square_free_part(12), (3, 2));
        assert_eq!(square_free_part(1), (1, 1));
        assert_eq!(square_free_part(7), (7, 1));
        assert_eq!(square_free_part(27), (3, 3));
        assert_eq!(square_free_part(720), (5, 12));
        // large prime near 2^61
        assert_eq!(square_free_part(2_305_843_009_213_693_951), (2_305_843_009_213_693_951, 1));
    }

    /// trial-division oracle for square-freeness
    fn is_square_free(n: u64) -> bool {
        (2..).take_while(|p| p * p <= n).all(|p| n % (p * p) != 0)
    }

    #[test]
    fn square_free_first_thousand() {
        for n in 1..=1000u64 {
            let (s, k) = square_free_part(n);
            assert_eq!(s * k * k, n, "n = {n}");
            assert!(is_square_free(s), "n = {n}");
        }
    }

    #[test]
    fn probe_finds_integer_relation() {
        let found = float_relation_probe(&[1.0, 2.0], 3).unwrap();
        assert!(found.contains(&vec![2, -1]));
        let pi = std::f64::consts::PI;
        let found = float_relation_probe(&[pi, 2.0 * pi], 3).unwrap();
        assert!(found.contains(&vec![2, -1]));
    }

    #[test]
    fn probe_respects_irrationality() {
        let found = float_relation_probe(&[1.0, 2f64.sqrt()], 10).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn probe_budget() {
        assert!(matches!(
            float_relation_probe(&[1.0; 8], 50),
            Err(NumberError::DimensionTooLarge { .. })
        ));
        assert!(matches!(
            float_relation_probe(&[1.0], 51),
            Err(NumberError::BoundTooLarge(51))
        ));
    }
}
