//! Deterministic random instance generators.
//!
//! All generators draw from the crate's splitmix generator so that test
//! populations are reproducible from a seed. Coefficients are kept small
//! rationals: the oracles downstream are exact and large numerators would
//! only slow them down.

use num_bigint::BigInt;
use num_traits::One;

use crate::linalg::{HermitianMatrix, RatMatrix, SymmetricMatrix};
use crate::moments::{DetRep, DiracSupport};
use crate::poly::{Monomial, Polynomial, Rat};
use crate::rng::SplitMix64;

/// Product of `k` linear polynomials `1 + a_i^T x` with small rational
/// points, returned with its Dirac support. Points are pairwise distinct so
/// that restrictions to random rays have at worst double roots (repeated
/// factors of high multiplicity would defeat the companion-matrix root
/// tolerance downstream).
pub fn random_linear_product(rng: &mut SplitMix64, n_vars: usize, k: usize) -> DiracSupport {
    let mut points: Vec<Vec<Rat>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut tries = 0;
        loop {
            let candidate: Vec<Rat> = (0..n_vars).map(|_| rng.rat(2, 2)).collect();
            if tries > 64 || !points.contains(&candidate) {
                points.push(candidate);
                break;
            }
            tries += 1;
        }
    }
    DiracSupport::new(n_vars, points).expect("dimensions agree by construction")
}

/// Random quadratic real zero polynomial with `p(0) = 1`, built so that the
/// discriminant certificate holds exactly: pick `b` and a Gram PSD matrix
/// `W = G^T G`, then `A = (b b^T - W) / 4`.
pub fn random_rz_quadratic(rng: &mut SplitMix64, n: usize) -> Polynomial {
    let g: Vec<Vec<Rat>> = (0..n)
        .map(|_| (0..n).map(|_| rng.rat(2, 2)).collect())
        .collect();
    let b: Vec<Rat> = (0..n).map(|_| rng.rat(2, 2)).collect();
    let quarter = crate::poly::rat_frac(1, 4);
    let mut p = Polynomial::one(n);
    for i in 0..n {
        p.add_term(Monomial::var(n, i), b[i].clone());
        for j in i..n {
            // w_ij = sum_k g_ki g_kj.
            let mut w = Rat::from(BigInt::from(0));
            for row in &g {
                w += &row[i] * &row[j];
            }
            let a_ij = (&b[i] * &b[j] - w) * &quarter;
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            // Off-diagonal entries appear twice in x^T A x.
            let coeff = if i == j {
                a_ij
            } else {
                a_ij * Rat::from(BigInt::from(2))
            };
            p.add_term(Monomial(e), coeff);
        }
    }
    p
}

/// Random Hermitian determinantal representation with dyadic entries
/// (quarters), size `d`, `n` coefficient matrices.
pub fn random_hermitian_detrep(rng: &mut SplitMix64, d: usize, n: usize) -> DetRep {
    let mut coeffs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut re = SymmetricMatrix::zeros(d);
        let mut im = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in i..d {
                re.set_sym(i, j, rng.range_i64(-4, 4) as f64 / 4.0);
                if i != j {
                    let b = rng.range_i64(-4, 4) as f64 / 4.0;
                    im[i][j] = b;
                    im[j][i] = -b;
                }
            }
        }
        coeffs.push(HermitianMatrix::from_parts(re, &im).expect("skew by construction"));
    }
    DetRep::new(coeffs).expect("equal sizes by construction")
}

/// Pythagorean-triple Givens rotations: exactly orthogonal rational
/// matrices built as products of plane rotations with rational sine and
/// cosine, composed with random sign flips.
pub fn random_rational_orthogonal(rng: &mut SplitMix64, n: usize) -> Vec<Vec<Rat>> {
    const TRIPLES: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (20, 21, 29)];
    let mut u = RatMatrix::identity(n);
    let rounds = (2 * n).max(2);
    for _ in 0..rounds {
        if n >= 2 {
            let i = rng.range_i64(0, n as i64 - 1) as usize;
            let mut j = rng.range_i64(0, n as i64 - 1) as usize;
            if i == j {
                j = (j + 1) % n;
            }
            let (a, b, c) = TRIPLES[rng.range_i64(0, 3) as usize];
            let cos = crate::poly::rat_frac(a, c);
            let sin = crate::poly::rat_frac(b, c);
            let mut g = RatMatrix::identity(n);
            g.set(i, i, cos.clone());
            g.set(j, j, cos);
            g.set(i, j, -sin.clone());
            g.set(j, i, sin);
            u = u.matmul(&g);
        }
    }
    // Random sign flips keep exact orthogonality.
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let sign = if rng.next_f64() < 0.5 {
            Rat::one()
        } else {
            -Rat::one()
        };
        rows.push((0..n).map(|j| u.get(i, j) * &sign).collect());
    }
    rows
}

/// Random hyperbolic polynomial from the diagonal determinantal family:
/// a product of `k` linear forms whose first coefficient is positive, so
/// the first unit vector is a hyperbolicity direction. Factors are kept
/// pairwise non-proportional so eigenvalues along random rays stay at
/// worst doubly degenerate.
pub fn random_hyperbolic_diag(rng: &mut SplitMix64, n: usize, k: usize) -> Polynomial {
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut tries = 0;
        loop {
            let mut row: Vec<Rat> = vec![Rat::from(BigInt::from(rng.range_i64(1, 3)))];
            for _ in 1..n {
                row.push(rng.rat(2, 2));
            }
            let proportional = rows.iter().any(|other| {
                // row ~ other iff row * other[0] == other * row[0]
                // (first entries are positive).
                (0..n).all(|i| &row[i] * &other[0] == &other[i] * &row[0])
            });
            if tries > 64 || !proportional {
                rows.push(row);
                break;
            }
            tries += 1;
        }
    }
    let mut p = Polynomial::one(n);
    for row in rows {
        let mut lin = Polynomial::zero(n);
        for (i, c) in row.into_iter().enumerate() {
            lin.add_term(Monomial::var(n, i), c);
        }
        p = p.mul(&lin);
    }
    p
}

/// Random hyperbolic polynomial from the 2x2-block determinantal family:
/// `det(x1 I + x2 A + x3 B)` with random dyadic symmetric blocks, expanded
/// exactly. Hyperbolic with respect to the first unit vector.
pub fn random_hyperbolic_block(rng: &mut SplitMix64, block_size: usize) -> Polynomial {
    let n = 3;
    let rand_sym = |rng: &mut SplitMix64| {
        let mut m = vec![vec![Rat::from(BigInt::from(0)); block_size]; block_size];
        for i in 0..block_size {
            for j in i..block_size {
                let v = rng.rat(2, 2);
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        m
    };
    let a = rand_sym(rng);
    let b = rand_sym(rng);
    let rows: Vec<Vec<Polynomial>> = (0..block_size)
        .map(|i| {
            (0..block_size)
                .map(|j| {
                    let mut entry = Polynomial::zero(n);
                    if i == j {
                        entry.add_term(Monomial::var(n, 0), Rat::one());
                    }
                    entry.add_term(Monomial::var(n, 1), a[i][j].clone());
                    entry.add_term(Monomial::var(n, 2), b[i][j].clone());
                    entry
                })
                .collect()
        })
        .collect();
    crate::polymat::det(&rows).expect("size within determinant cap")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{hyperbolicity_probe, real_zero_probe};

    #[test]
    fn quadratics_are_real_zero() {
        let mut rng = SplitMix64::new(201);
        for k in 0..50 {
            let n = rng.range_i64(1, 6) as usize;
            let p = random_rz_quadratic(&mut rng, n);
            let (_, verdict) = crate::geometry::quadratic_rz_certificate(&p).unwrap();
            assert_ne!(verdict, crate::linalg::PsdVerdict::NotPsd, "p = {p}");
            assert!(real_zero_probe(&p, 16, 1e-7, 300 + k).unwrap().passed);
        }
    }

    #[test]
    fn rational_orthogonal_matrices_are_exact() {
        let mut rng = SplitMix64::new(202);
        for _ in 0..20 {
            let n = rng.range_i64(2, 5) as usize;
            let u = random_rational_orthogonal(&mut rng, n);
            // U^T U = I exactly.
            for i in 0..n {
                for j in 0..n {
                    let mut dot = Rat::from(BigInt::from(0));
                    for row in &u {
                        dot += &row[i] * &row[j];
                    }
                    let expect = if i == j {
                        Rat::one()
                    } else {
                        Rat::from(BigInt::from(0))
                    };
                    assert_eq!(dot, expect);
                }
            }
        }
    }

    #[test]
    fn hyperbolic_families_pass_probe() {
        let mut rng = SplitMix64::new(203);
        for k in 0..20 {
            let n = rng.range_i64(2, 3) as usize;
            let deg = rng.range_i64(1, 3) as usize;
            let p = random_hyperbolic_diag(&mut rng, n, deg);
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            assert!(hyperbolicity_probe(&p, &e, 16, 1e-7, 400 + k).unwrap().passed);
        }
        for k in 0..10 {
            let p = random_hyperbolic_block(&mut rng, 2);
            assert!(
                hyperbolicity_probe(&p, &[1.0, 0.0, 0.0], 16, 1e-7, 500 + k)
                    .unwrap()
                    .passed
            );
        }
    }

    #[test]
    fn linear_products_match_their_support() {
        let mut rng = SplitMix64::new(204);
        let support = random_linear_product(&mut rng, 2, 3);
        let p = support.product_polynomial();
        assert!(p.degree().unwrap_or(0) <= 3);
        assert!(p.constant_term().is_one());
    }
}
