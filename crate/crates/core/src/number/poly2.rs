//! Polynomials over GF(2) and integer characteristic polynomials.

use std::fmt;

use serde::Serialize;

/// Polynomial over Z₂, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Poly2 {
    coeffs: Vec<bool>,
}

impl Poly2 {
    pub fn new(mut coeffs: Vec<bool>) -> Self {
        while coeffs.last() == Some(&false) {
            coeffs.pop();
        }
        Poly2 { coeffs }
    }

    pub fn one() -> Self {
        Poly2 { coeffs: vec![true] }
    }

    /// `t - root` reduced mod 2.
    pub fn linear(root: i64) -> Self {
        Poly2::new(vec![root.rem_euclid(2) == 1, true])
    }

    /// Reduces integer coefficients (ascending degree) mod 2.
    pub fn from_integer_coeffs(c: &[i128]) -> Self {
        Poly2::new(c.iter().map(|x| x.rem_euclid(2) == 1).collect())
    }

    pub fn coeffs(&self) -> &[bool] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        !self.coeffs.is_empty()
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly2::new(Vec::new());
        }
        let mut out = vec![false; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if !a {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] ^= b;
            }
        }
        Poly2::new(out)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c)
            .map(|(k, _)| match k {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// `det(tI - A)` over the integers by Berkowitz' division-free algorithm.
/// Coefficients are returned in ascending degree.
pub fn integer_charpoly(a: &[Vec<i64>]) -> Vec<i128> {
    let n = a.len();
    let m: Vec<Vec<i128>> = a
        .iter()
        .map(|row| {
            assert_eq!(row.len(), n, "matrix must be square");
            row.iter().map(|&x| x as i128).collect()
        })
        .collect();
    // descending coefficients of the charpoly of the leading r×r block
    let mut vect: Vec<i128> = vec![1];
    for r in 0..n {
        // Toeplitz column: 1, -a_rr, -R C, -R A C, ..., -R A^{r-1} C
        let mut col = Vec::with_capacity(r + 2);
        col.push(1);
        col.push(-m[r][r]);
        let mut power: Vec<i128> = (0..r).map(|i| m[i][r]).collect();
        for _ in 0..r {
            let rc: i128 = (0..r).map(|j| m[r][j] * power[j]).sum();
            col.push(-rc);
            power = (0..r)
                .map(|i| (0..r).map(|j| m[i][j] * power[j]).sum())
                .collect();
        }
        let mut next = vec![0i128; r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, &v) in vect.iter().enumerate() {
                if i >= j {
                    *slot += col[i - j] * v;
                }
            }
        }
        vect = next;
    }
    vect.reverse();
    vect
}

/// Characteristic polynomial of an integer matrix, reduced mod 2.
pub fn charpoly_mod2(a: &[Vec<i64>]) -> Poly2 {
    Poly2::from_integer_coeffs(&integer_charpoly(a))
}

/// `Π (t - θ)` over `roots`, reduced mod 2.
pub fn poly_from_roots_mod2(roots: &[i64]) -> Poly2 {
    roots
        .iter()
        .fold(Poly2::one(), |acc, &r| acc.mul(&Poly2::linear(r)))
}
