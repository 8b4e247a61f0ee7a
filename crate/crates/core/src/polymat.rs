//! Exact determinants of matrices with polynomial entries.
//!
//! Sizes here are small (at most 9), so the determinant is computed by
//! dynamic programming over column subsets: the minor on the first `k` rows
//! and a column set `S` with `|S| = k` is expanded along row `k`. This costs
//! `O(2^n n)` polynomial multiplications, stays exact over the rationals and
//! avoids the factorial blowup of naive cofactor expansion.
//!
//! A Gaussian variant works on complex entries represented as `(re, im)`
//! polynomial pairs, which is what the expansion of Hermitian determinantal
//! representations needs; the imaginary part of such a determinant cancels
//! to exactly zero.

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Multiplication cap: subset DP allocates `2^size` minors.
const MAX_SIZE: usize = 12;

/// Exact determinant of a square matrix of polynomials (entries in
/// row-major `rows`).
pub fn det(rows: &[Vec<Polynomial>]) -> Result<Polynomial> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rows.iter().map(|r| r.len()).max().unwrap_or(0),
        });
    }
    if n > MAX_SIZE {
        return Err(Error::Capacity(format!(
            "determinant of size {n} exceeds the cap of {MAX_SIZE}"
        )));
    }
    let n_vars = rows
        .first()
        .and_then(|r| r.first())
        .map_or(0, |p| p.n_vars());
    if n == 0 {
        // The determinant of the empty matrix is 1.
        return Ok(Polynomial::one(n_vars));
    }
    // minors[s] = det of rows 0..popcount(s) on column set s.
    let mut minors: Vec<Option<Polynomial>> = vec![None; 1 << n];
    minors[0] = Some(Polynomial::one(n_vars));
    for s in 1usize..(1 << n) {
        let k = (s as u32).count_ones() as usize; // rows 0..k
        let mut acc = Polynomial::zero(n_vars);
        let mut r = 0usize; // position of column j inside S
        for j in 0..n {
            if s & (1 << j) == 0 {
                continue;
            }
            let sub = minors[s & !(1 << j)]
                .as_ref()
                .expect("subset minors are filled in order");
            let entry = &rows[k - 1][j];
            if !entry.is_zero() && !sub.is_zero() {
                let contrib = sub.mul(entry);
                // Cofactor expansion along row k-1: sign (-1)^{(k-1)+r}.
                acc = if (k - 1 + r) % 2 == 0 {
                    acc.add(&contrib)
                } else {
                    acc.sub(&contrib)
                };
            }
            r += 1;
        }
        minors[s] = Some(acc);
    }
    Ok(minors[(1 << n) - 1].take().unwrap())
}

/// Complex polynomial as a real/imaginary pair.
#[derive(Debug, Clone)]
pub struct GaussPoly {
    pub re: Polynomial,
    pub im: Polynomial,
}

impl GaussPoly {
    pub fn real(p: Polynomial) -> Self {
        let n = p.n_vars();
        GaussPoly {
            re: p,
            im: Polynomial::zero(n),
        }
    }

    fn zero(n_vars: usize) -> Self {
        GaussPoly {
            re: Polynomial::zero(n_vars),
            im: Polynomial::zero(n_vars),
        }
    }

    fn one(n_vars: usize) -> Self {
        GaussPoly {
            re: Polynomial::one(n_vars),
            im: Polynomial::zero(n_vars),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        GaussPoly {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    fn sub(&self, other: &Self) -> Self {
        GaussPoly {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        GaussPoly {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }
}

/// Exact determinant of a matrix of complex polynomials.
pub fn det_gauss(rows: &[Vec<GaussPoly>]) -> Result<GaussPoly> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rows.iter().map(|r| r.len()).max().unwrap_or(0),
        });
    }
    if n > MAX_SIZE {
        return Err(Error::Capacity(format!(
            "determinant of size {n} exceeds the cap of {MAX_SIZE}"
        )));
    }
    let n_vars = rows
        .first()
        .and_then(|r| r.first())
        .map_or(0, |p| p.re.n_vars());
    if n == 0 {
        return Ok(GaussPoly::one(n_vars));
    }
    let mut minors: Vec<Option<GaussPoly>> = vec![None; 1 << n];
    minors[0] = Some(GaussPoly::one(n_vars));
    for s in 1usize..(1 << n) {
        let k = (s as u32).count_ones() as usize;
        let mut acc = GaussPoly::zero(n_vars);
        let mut r = 0usize;
        for j in 0..n {
            if s & (1 << j) == 0 {
                continue;
            }
            let sub = minors[s & !(1 << j)].as_ref().unwrap();
            let entry = &rows[k - 1][j];
            if !entry.is_zero() && !sub.is_zero() {
                let contrib = sub.mul(entry);
                acc = if (k - 1 + r) % 2 == 0 {
                    acc.add(&contrib)
                } else {
                    acc.sub(&contrib)
                };
            }
            r += 1;
        }
        minors[s] = Some(acc);
    }
    Ok(minors[(1 << n) - 1].take().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat_i64, Monomial, Rat};

    fn c(v: i64, n: usize) -> Polynomial {
        Polynomial::constant(n, rat_i64(v))
    }

    #[test]
    fn det_2x2_numeric() {
        let rows = vec![vec![c(1, 0), c(2, 0)], vec![c(3, 0), c(4, 0)]];
        assert_eq!(det(&rows).unwrap(), c(-2, 0));
    }

    #[test]
    fn det_matches_leibniz_on_random_3x3() {
        let mut rng = crate::rng::SplitMix64::new(5);
        for _ in 0..50 {
            let rows: Vec<Vec<Polynomial>> = (0..3)
                .map(|_| {
                    (0..3)
                        .map(|_| Polynomial::constant(0, rng.rat(4, 2)))
                        .collect()
                })
                .collect();
            let d = det(&rows).unwrap();
            // Leibniz over the 6 permutations of S3.
            let perms: [([usize; 3], i64); 6] = [
                ([0, 1, 2], 1),
                ([0, 2, 1], -1),
                ([1, 0, 2], -1),
                ([1, 2, 0], 1),
                ([2, 0, 1], 1),
                ([2, 1, 0], -1),
            ];
            let mut expected = Rat::from(num_bigint::BigInt::from(0));
            for (p, s) in perms {
                let mut term = rat_i64(s);
                for (i, &pi) in p.iter().enumerate() {
                    term *= rows[i][pi].coeff(&Monomial::one(0));
                }
                expected += term;
            }
            assert_eq!(d.coeff(&Monomial::one(0)), expected);
        }
    }

    #[test]
    fn det_symbolic_pencil() {
        // det [[1 + x1, x2], [x2, 1 - x1]] = 1 - x1^2 - x2^2.
        let one_plus = Polynomial::parse_with_vars("1 + x1", 2).unwrap();
        let one_minus = Polynomial::parse_with_vars("1 - x1", 2).unwrap();
        let x2 = Polynomial::parse_with_vars("x2", 2).unwrap();
        let rows = vec![vec![one_plus, x2.clone()], vec![x2, one_minus]];
        assert_eq!(
            det(&rows).unwrap(),
            Polynomial::parse("1 - x1^2 - x2^2").unwrap()
        );
    }

    #[test]
    fn det_gauss_imaginary_cancels() {
        // det [[1, x1 + i x2], [x1 - i x2, 1]] = 1 - x1^2 - x2^2.
        let one = GaussPoly::real(Polynomial::parse_with_vars("1", 2).unwrap());
        let x1 = Polynomial::parse_with_vars("x1", 2).unwrap();
        let x2 = Polynomial::parse_with_vars("x2", 2).unwrap();
        let upper = GaussPoly {
            re: x1.clone(),
            im: x2.clone(),
        };
        let lower = GaussPoly {
            re: x1,
            im: x2.neg(),
        };
        let rows = vec![vec![one.clone(), upper], vec![lower, one]];
        let d = det_gauss(&rows).unwrap();
        assert!(d.im.is_zero());
        assert_eq!(d.re, Polynomial::parse("1 - x1^2 - x2^2").unwrap());
    }

    #[test]
    fn det_empty_and_oversize() {
        assert_eq!(det(&[]).unwrap(), Polynomial::one(0));
        let big: Vec<Vec<Polynomial>> = (0..13).map(|_| vec![c(0, 0); 13]).collect();
        assert!(matches!(det(&big), Err(Error::Capacity(_))));
    }
}
