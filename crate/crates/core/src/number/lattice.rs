//! Integer relation lattices `{l ∈ Z^d : Σ l_r v_r = 0}` for exact values.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::surd::{Basis, Surd};

/// Basis of the full integer kernel of a list of exact values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationLattice {
    dim: usize,
    generators: Vec<Vec<i64>>,
}

impl RelationLattice {
    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Length of each lattice vector.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of `l` in the generator basis, if `l` lies in their real span.
    pub fn coordinates(&self, l: &[i64]) -> Option<Vec<BigRational>> {
        assert_eq!(l.len(), self.dim);
        let k = self.generators.len();
        // augmented system Gᵀ c = l, rows indexed by coordinate
        let mut rows: Vec<Vec<BigRational>> = (0..self.dim)
            .map(|i| {
                let mut row: Vec<BigRational> = self
                    .generators
                    .iter()
                    .map(|g| BigRational::from_integer(g[i].into()))
                    .collect();
                row.push(BigRational::from_integer(l[i].into()));
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..k {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][c].recip();
            for x in rows[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..rows.len() {
                if i != r && !rows[i][c].is_zero() {
                    let f = rows[i][c].clone();
                    for j in 0..=k {
                        let sub = &f * &rows[r][j];
                        rows[i][j] -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if rows[r..].iter().any(|row| !row[k].is_zero()) {
            return None;
        }
        let mut coords = vec![BigRational::zero(); k];
        for (i, &c) in pivots.iter().enumerate() {
            coords[c] = rows[i][k].clone();
        }
        Some(coords)
    }

    /// Whether `l` is an integer combination of the generators.
    pub fn contains(&self, l: &[i64]) -> bool {
        self.coordinates(l)
            .is_some_and(|c| c.iter().all(|x| x.is_integer()))
    }
}

fn to_bigint_rows(values: &[Surd]) -> Vec<Vec<BigInt>> {
    let keys: BTreeSet<&Basis> = values
        .iter()
        .flat_map(|v| v.components().map(|(b, _)| b))
        .collect();
    keys.into_iter()
        .map(|b| {
            let coefs: Vec<BigRational> = values.iter().map(|v| v.coefficient(b)).collect();
            let lcm = coefs
                .iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            coefs
                .iter()
                .map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Integer kernel basis of the integer matrix `rows` (k × d).
///
/// Column operations reduce `rows` to echelon form while the same operations
/// are recorded in a unimodular `d × d` matrix; the columns of that matrix
/// beyond the pivot count span the kernel exactly.
pub fn integer_kernel(rows: &[Vec<BigInt>], d: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    // u[c] is column c of the transform
    let mut u: Vec<Vec<BigInt>> = (0..d)
        .map(|c| {
            (0..d)
                .map(|i| if i == c { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut pivot = 0;
    for row in 0..a.len() {
        if pivot == d {
            break;
        }
        loop {
            // smallest nonzero |a[row][c]| for c >= pivot
            let best = (pivot..d)
                .filter(|&c| !a[row][c].is_zero())
                .min_by(|&x, &y| a[row][x].abs().cmp(&a[row][y].abs()));
            let Some(best) = best else { break };
            swap_cols(&mut a, &mut u, pivot, best);
            let mut done = true;
            for c in pivot + 1..d {
                if a[row][c].is_zero() {
                    continue;
                }
                let q = a[row][c].div_floor(&a[row][pivot]);
                col_axpy(&mut a, &mut u, c, pivot, &q);
                if !a[row][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !a[row][pivot].is_zero() {
            pivot += 1;
        }
    }
    u.drain(pivot..).collect()
}

fn swap_cols(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], x: usize, y: usize) {
    if x == y {
        return;
    }
    for row in a.iter_mut() {
        row.swap(x, y);
    }
    u.swap(x, y);
}

/// column `dst -= q * column src`
fn col_axpy(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let s = &row[src] * q;
        row[dst] -= s;
    }
    let s: Vec<BigInt> = u[src].iter().map(|x| x * q).collect();
    for (x, y) in u[dst].iter_mut().zip(s) {
        *x -= y;
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pairwise size reduction; keeps the lattice, shortens the basis.
fn reduce(basis: &mut [Vec<BigInt>]) {
    for _ in 0..64 {
        let mut changed = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let nj = dot(&basis[j], &basis[j]);
                if nj.is_zero() {
                    continue;
                }
                let num = dot(&basis[i], &basis[j]);
                let mu = round_div(&num, &nj);
                if mu.is_zero() {
                    continue;
                }
                let cand: Vec<BigInt> = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(x, y)| x - &mu * y)
                    .collect();
                if dot(&cand, &cand) < dot(&basis[i], &basis[i]) {
                    basis[i] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (n * &two + d).div_floor(&(d * &two))
}

fn canonical_sign(v: &mut [BigInt]) {
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in v.iter_mut() {
            *x = -&*x;
        }
    }
}

/// Integer relation lattice of `values`.
///
/// # Panics
/// If a generator entry does not fit in `i64`, which needs coefficients far
/// beyond any realistic input.
pub fn relation_lattice(values: &[Surd]) -> RelationLattice {
    let d = values.len();
    let rows = to_bigint_rows(values);
    let mut kernel = integer_kernel(&rows, d);
    reduce(&mut kernel);
    for g in kernel.iter_mut() {
        canonical_sign(g);
    }
    kernel.sort_by(|a, b| {
        let na = dot(a, a);
        let nb = dot(b, b);
        na.cmp(&nb).then_with(|| b.cmp(a))
    });
    let generators = kernel
        .into_iter()
        .map(|g| {
            g.iter()
                .map(|x| x.to_i64().expect("relation coefficient overflows i64"))
                .collect()
        })
        .collect();
    RelationLattice { dim: d, generators }
}

/// Exact test of `Σ l_r v_r = 0`.
pub fn is_relation(values: &[Surd], l: &[i64]) -> bool {
    assert_eq!(values.len(), l.len());
    values
        .iter()
        .zip(l)
        .fold(Surd::zero(), |acc, (v, &k)| {
            &acc + &v.scale(&BigRational::from_integer(k.into()))
        })
        .is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::surd::rat;

    fn s(n: i64) -> Surd {
        Surd::integer(n)
    }

    #[test]
    fn multiples_of_root3() {
        let v = vec![Surd::sqrt(3), -Surd::sqrt(3), Surd::sqrt_scaled(rat(2, 1), 3)];
        let lat = relation_lattice(&v);
        assert_eq!(lat.rank(), 2);
        assert!(lat.contains(&[1, 1, 0]));
        assert!(lat.contains(&[2, 0, -1]));
        assert!(!lat.contains(&[1, 0, 0]));
        for g in lat.generators() {
            assert!(is_relation(&v, g));
        }
    }

    #[test]
    fn small_integers() {
        let v = vec![s(1), s(2), s(3)];
        let lat = relation_lattice(&v);
        assert_eq!(lat.rank(), 2);
        assert!(lat.contains(&[2, -1, 0]));
        assert!(lat.contains(&[3, 0, -1]));
        assert!(lat.contains(&[1, 1, -1]));
    }

    #[test]
    fn independent_values_have_trivial_lattice() {
        let v = vec![s(1), Surd::sqrt(2), Surd::sqrt(3), Surd::pi()];
        assert_eq!(relation_lattice(&v).rank(), 0);
    }

    #[test]
    fn zero_value_is_its_own_relation() {
        let v = vec![Surd::zero(), Surd::sqrt(5)];
        let lat = relation_lattice(&v);
        assert_eq!(lat.generators(), &[vec![1, 0]]);
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x + 4y = 0 has kernel generated by (2, -1), not (4, -2)
        let rows = vec![vec![BigInt::from(2), BigInt::from(4)]];
        let k = integer_kernel(&rows, 2);
        assert_eq!(k.len(), 1);
        let g: Vec<i64> = k[0].iter().map(|x| x.to_i64().unwrap()).collect();
        assert!(g == vec![2, -1] || g == vec![-2, 1]);
    }

    #[test]
    fn star_product_relations_m1() {
        // √m, -√m, (±√3 ± √(3+4m))/2 at m = 1
        let half = rat(1, 2);
        let r3 = Surd::sqrt_scaled(half.clone(), 3);
        let r7 = Surd::sqrt_scaled(half, 7);
        let v = vec![
            s(1),
            s(-1),
            &r3 + &r7,
            &r3 - &r7,
            &(-&r3) + &r7,
            &(-&r3) - &r7,
        ];
        let lat = relation_lattice(&v);
        for g in lat.generators() {
            // every surd coefficient in the relation vanishes
            assert_eq!(g[0] - g[1], 0);
            assert_eq!(g[2] + g[3] - g[4] - g[5], 0);
            assert_eq!(g[2] - g[3] + g[4] - g[5], 0);
        }
        // x1 = x2, plus a rank-2 solution space in the last four
        assert_eq!(lat.rank(), 3);
    }
}
