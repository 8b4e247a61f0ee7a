//! The pseudo-moment linear form of a polynomial and its oracles.
//!
//! For `p` with `p(0) != 0` and a virtual degree `d`, the linear form
//! `L_{p,d}` is defined on monomials by `L(1) = d` and by matching the
//! coefficients of the truncated power series `-log(p(-x)/p(0))`:
//!
//! ```text
//! -log(p(-x)/p(0)) = sum_{a != 0} (1/|a|) binom(|a|, a) L(x^a) x^a .
//! ```
//!
//! When `p` is a product of linear polynomials `1 + a_i^T x`, the form is
//! integration against the sum of Dirac measures at the points `a_i`; when
//! `p = det(I + x_1 A_1 + ... + x_n A_n)` with Hermitian coefficients, its
//! values are normalized traces of Hurwitz products. These two independent
//! oracles are implemented here next to the series-based table so they can
//! be cross-checked.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, HermitianMatrix};
use crate::poly::{
    log_series, monomials_up_to, rat_from_f64, rat_i64, rat_to_f64, Monomial, Polynomial, Rat,
};
use crate::polymat::{det_gauss, GaussPoly};

/// Cap on `|a|` for Hurwitz products (word enumeration grows factorially).
pub const MAX_HURWITZ_DEGREE: u32 = 6;

/// Caps for exact determinantal expansion.
pub const MAX_DETREP_SIZE: usize = 8;
pub const MAX_DETREP_VARS: usize = 6;

// ---------------------------------------------------------------------------
// Moment table
// ---------------------------------------------------------------------------

/// The linear form `L_{p,d}` tabulated on every monomial of degree
/// `1..=cutoff`; the value at `1` is the virtual degree and is stored as
/// metadata, not in the map (the infinite-virtual-degree pencil deletes
/// exactly the row and column involving it).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentTable {
    n_vars: usize,
    virtual_degree: u32,
    cutoff: u32,
    values: BTreeMap<Monomial, Rat>,
}

impl MomentTable {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn virtual_degree(&self) -> u32 {
        self.virtual_degree
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// `L(x^a)` for `|a| <= cutoff`; `L(1)` is the virtual degree.
    pub fn value(&self, m: &Monomial) -> Result<Rat> {
        if m.is_one() {
            return Ok(rat_i64(self.virtual_degree as i64));
        }
        if m.degree() > self.cutoff {
            return Err(Error::DegreeBound {
                got: m.degree(),
                bound: self.cutoff,
            });
        }
        Ok(self.values.get(m).cloned().unwrap_or_else(Rat::zero))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.values.iter()
    }

    /// Same values re-tagged with a different virtual degree.
    pub fn with_virtual_degree(&self, d: u32) -> Self {
        MomentTable {
            virtual_degree: d,
            ..self.clone()
        }
    }

    /// Entrywise sum; virtual degrees add (the product rule
    /// `L_{pq,d+e} = L_{p,d} + L_{q,e}`).
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_vars != other.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: other.n_vars,
            });
        }
        let cutoff = self.cutoff.min(other.cutoff);
        let mut values = BTreeMap::new();
        for m in monomials_up_to(self.n_vars, cutoff) {
            if m.is_one() {
                continue;
            }
            let v = self.value(&m)? + other.value(&m)?;
            values.insert(m, v);
        }
        Ok(MomentTable {
            n_vars: self.n_vars,
            virtual_degree: self.virtual_degree + other.virtual_degree,
            cutoff,
            values,
        })
    }

    /// Sub-table on the first `m` variables (restriction to
    /// `x_{m+1} = ... = x_n = 0`).
    pub fn restrict_vars(&self, m: usize) -> Result<Self> {
        if m > self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: m,
            });
        }
        let mut values = BTreeMap::new();
        for (mono, v) in &self.values {
            if mono.0[m..].iter().all(|&e| e == 0) {
                values.insert(Monomial(mono.0[..m].to_vec()), v.clone());
            }
        }
        Ok(MomentTable {
            n_vars: m,
            virtual_degree: self.virtual_degree,
            cutoff: self.cutoff,
            values,
        })
    }
}

/// Tabulate `L_{p,d}` on all monomials of degree `1..=cutoff`, exactly.
pub fn moment_table(p: &Polynomial, virtual_degree: u32, cutoff: u32) -> Result<MomentTable> {
    let p0 = p.constant_term();
    if p0.is_zero() {
        return Err(Error::ZeroAtOrigin);
    }
    if cutoff < 1 {
        return Err(Error::Capacity("moment cutoff must be at least 1".into()));
    }
    let normalized = p.negate_variables().scale(&(Rat::one() / p0));
    let series = log_series(&normalized, cutoff)?.into_poly().neg();
    let mut values = BTreeMap::new();
    for m in monomials_up_to(p.n_vars(), cutoff) {
        if m.is_one() {
            continue;
        }
        let coeff = series.coeff(&m);
        let v = coeff * rat_i64(m.degree() as i64) / Rat::from(m.multinomial());
        values.insert(m, v);
    }
    Ok(MomentTable {
        n_vars: p.n_vars(),
        virtual_degree,
        cutoff,
        values,
    })
}

/// Closed cubic formulas for the moments of degree up to three, written in
/// the coefficients of `p` directly (no series arithmetic).
pub fn cubic_moments_closed_form(p: &Polynomial, virtual_degree: u32) -> Result<MomentTable> {
    let p0 = p.constant_term();
    if p0.is_zero() {
        return Err(Error::ZeroAtOrigin);
    }
    let n = p.n_vars();
    let q = p.scale(&(Rat::one() / p0));
    // Coefficient accessor a_\alpha on the normalized polynomial.
    let a = |exps: &[usize]| -> Rat {
        let mut e = vec![0u32; n];
        for &i in exps {
            e[i] += 1;
        }
        q.coeff(&Monomial(e))
    };
    let mut values = BTreeMap::new();
    for m in monomials_up_to(n, 3) {
        if m.is_one() {
            continue;
        }
        // Indices with multiplicity, ascending.
        let mut idx = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                idx.push(i);
            }
        }
        let v = match idx.as_slice() {
            [i] => a(&[*i]),
            [i, j] if i == j => {
                let ai = a(&[*i]);
                -rat_i64(2) * a(&[*i, *i]) + &ai * &ai
            }
            [i, j] => {
                // L(x_i x_j) = -a_ij + a_i a_j
                -a(&[*i, *j]) + a(&[*i]) * a(&[*j])
            }
            [i, j, k] if i == j && j == k => {
                let ai = a(&[*i]);
                rat_i64(3) * a(&[*i, *i, *i]) - rat_i64(3) * &ai * a(&[*i, *i])
                    + &ai * &ai * &ai
            }
            [i, j, k] if i == j || j == k => {
                // Square times a distinct variable: x_u^2 x_v.
                let (u, v) = if i == j { (*i, *k) } else { (*j, *i) };
                let au = a(&[u]);
                a(&[u, u, v]) - &au * a(&[u, v]) - a(&[v]) * a(&[u, u]) + &au * &au * a(&[v])
            }
            [i, j, k] => {
                let (ai, aj, ak) = (a(&[*i]), a(&[*j]), a(&[*k]));
                (a(&[*i, *j, *k]) - &ai * a(&[*j, *k]) - &aj * a(&[*i, *k]) - &ak * a(&[*i, *j])
                    + rat_i64(2) * &ai * &aj * &ak)
                    / rat_i64(2)
            }
            _ => unreachable!("degree capped at three"),
        };
        values.insert(m, v);
    }
    Ok(MomentTable {
        n_vars: n,
        virtual_degree,
        cutoff: 3,
        values,
    })
}

/// Linear extension `L(q) = sum coeff_a(q) L(x^a)` with `L(1) = d`.
pub fn moment_apply(table: &MomentTable, q: &Polynomial) -> Result<Rat> {
    if q.n_vars() != table.n_vars {
        return Err(Error::DimensionMismatch {
            expected: table.n_vars,
            got: q.n_vars(),
        });
    }
    let mut sum = Rat::zero();
    for (m, c) in q.terms() {
        sum += c * table.value(m)?;
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Dirac oracle
// ---------------------------------------------------------------------------

/// Support of a sum of Dirac measures: the points `a_1, ..., a_d`
/// representing `p = prod_i (1 + a_i^T x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiracSupport {
    points: Vec<Vec<Rat>>,
    n_vars: usize,
}

impl DiracSupport {
    pub fn new(n_vars: usize, points: Vec<Vec<Rat>>) -> Result<Self> {
        for p in &points {
            if p.len() != n_vars {
                return Err(Error::DimensionMismatch {
                    expected: n_vars,
                    got: p.len(),
                });
            }
        }
        Ok(DiracSupport { points, n_vars })
    }

    pub fn points(&self) -> &[Vec<Rat>] {
        &self.points
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    /// The represented polynomial `prod_i (1 + a_i^T x)`.
    pub fn product_polynomial(&self) -> Polynomial {
        let n = self.n_vars;
        let mut p = Polynomial::one(n);
        for a in &self.points {
            let mut lin = Polynomial::one(n);
            for (i, ai) in a.iter().enumerate() {
                lin.add_term(Monomial::var(n, i), ai.clone());
            }
            p = p.mul(&lin);
        }
        p
    }
}

/// Exact Dirac-sum evaluation `L_p(q) = sum_i q(a_i)`.
pub fn dirac_moments(support: &DiracSupport, q: &Polynomial) -> Result<Rat> {
    if q.n_vars() != support.n_vars {
        return Err(Error::DimensionMismatch {
            expected: support.n_vars,
            got: q.n_vars(),
        });
    }
    let mut sum = Rat::zero();
    for a in &support.points {
        sum += q.eval_rat(a)?;
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Determinantal representations and the Hurwitz-trace oracle
// ---------------------------------------------------------------------------

/// Monic determinantal representation `det(I_d + x_1 A_1 + ... + x_n A_n)`
/// with Hermitian coefficient matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetRep {
    size: usize,
    #[serde(rename = "A")]
    coeffs: Vec<HermitianMatrix>,
}

impl DetRep {
    pub fn new(coeffs: Vec<HermitianMatrix>) -> Result<Self> {
        let size = coeffs.first().map_or(0, |m| m.size());
        for c in &coeffs {
            if c.size() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    got: c.size(),
                });
            }
        }
        Ok(DetRep { size, coeffs })
    }

    /// Real symmetric representation from plain symmetric blocks.
    pub fn from_symmetric(blocks: Vec<crate::linalg::SymmetricMatrix>) -> Result<Self> {
        Self::new(
            blocks
                .into_iter()
                .map(HermitianMatrix::from_symmetric)
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn n_vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[HermitianMatrix] {
        &self.coeffs
    }
}

/// The alpha-Hurwitz product: sum over all words in which letter `i`
/// appears exactly `alpha_i` times of the corresponding matrix products.
/// The empty word gives the identity.
pub fn hurwitz_product(matrices: &[HermitianMatrix], alpha: &Monomial) -> Result<HermitianMatrix> {
    if alpha.n_vars() != matrices.len() {
        return Err(Error::DimensionMismatch {
            expected: matrices.len(),
            got: alpha.n_vars(),
        });
    }
    let d = matrices.first().map_or(0, |m| m.size());
    for m in matrices {
        if m.size() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.size(),
            });
        }
    }
    if alpha.degree() > MAX_HURWITZ_DEGREE {
        return Err(Error::Capacity(format!(
            "Hurwitz degree {} exceeds the cap of {MAX_HURWITZ_DEGREE}",
            alpha.degree()
        )));
    }
    let cmats: Vec<CMat> = matrices.iter().map(|m| m.to_cmat()).collect();
    let mut acc = CMat::zeros(d);
    let mut remaining = alpha.0.clone();
    // Depth-first over words, carrying the prefix product.
    walk_words(&cmats, &mut remaining, &CMat::identity(d), &mut acc);
    // The sum over all words of Hermitian factors is Hermitian again; its
    // diagonal (and so its trace) is real. Verify the residue before
    // symmetrizing roundoff away.
    let scale = 1.0 + acc.re.norm().max(acc.im.norm());
    let worst_diag_im = (0..d).map(|i| acc.im[(i, i)].abs()).fold(0.0, f64::max);
    if worst_diag_im > 1e-10 * scale {
        return Err(Error::Numerical(format!(
            "imaginary residue {worst_diag_im:.3e} on the Hurwitz diagonal"
        )));
    }
    let mut re_rows = vec![vec![0.0; d]; d];
    let mut im_rows = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            re_rows[i][j] = 0.5 * (acc.re[(i, j)] + acc.re[(j, i)]);
            im_rows[i][j] = 0.5 * (acc.im[(i, j)] - acc.im[(j, i)]);
        }
    }
    let re = crate::linalg::SymmetricMatrix::from_rows(&re_rows)?;
    HermitianMatrix::from_parts(re, &im_rows)
}

fn walk_words(mats: &[CMat], remaining: &mut Vec<u32>, prefix: &CMat, acc: &mut CMat) {
    if remaining.iter().all(|&r| r == 0) {
        acc.add_assign(prefix);
        return;
    }
    for i in 0..mats.len() {
        if remaining[i] == 0 {
            continue;
        }
        remaining[i] -= 1;
        let next = prefix.mul(&mats[i]);
        walk_words(mats, remaining, &next, acc);
        remaining[i] += 1;
    }
}

/// `L_{p,d}(x^a) = tr(hur_a(A)) / binom(|a|, a)` for the polynomial
/// represented by `rep`. The imaginary residue of the trace must stay below
/// `1e-10` (traces of Hurwitz products of Hermitian matrices are real).
pub fn detrep_moment(rep: &DetRep, alpha: &Monomial) -> Result<f64> {
    let hur = hurwitz_product(rep.coeffs(), alpha)?;
    let tr = hur.trace();
    let multinomial = rat_to_f64(&Rat::from(alpha.multinomial()));
    Ok(tr / multinomial)
}

/// Expand `det(I + sum x_i A_i)` into an exact polynomial. Floating point
/// entries are converted to rationals exactly (every double is dyadic), so
/// the imaginary part cancels identically and the result is exact for the
/// stored matrices.
pub fn detrep_expand(rep: &DetRep) -> Result<Polynomial> {
    let d = rep.size();
    let n = rep.n_vars();
    if d > MAX_DETREP_SIZE {
        return Err(Error::Capacity(format!(
            "determinantal size {d} exceeds the cap of {MAX_DETREP_SIZE}"
        )));
    }
    if n > MAX_DETREP_VARS {
        return Err(Error::Capacity(format!(
            "{n} variables exceeds the determinantal cap of {MAX_DETREP_VARS}"
        )));
    }
    let mut rows = Vec::with_capacity(d);
    for i in 0..d {
        let mut row = Vec::with_capacity(d);
        for j in 0..d {
            let mut re = Polynomial::zero(n);
            let mut im = Polynomial::zero(n);
            if i == j {
                re.add_term(Monomial::one(n), Rat::one());
            }
            for (k, a) in rep.coeffs().iter().enumerate() {
                re.add_term(Monomial::var(n, k), rat_from_f64(a.re_entry(i, j))?);
                im.add_term(Monomial::var(n, k), rat_from_f64(a.im(i, j))?);
            }
            row.push(GaussPoly { re, im });
        }
        rows.push(row);
    }
    let det = det_gauss(&rows)?;
    if !det.im.is_zero() {
        let worst = det
            .im
            .terms()
            .map(|(_, c)| rat_to_f64(&c.abs()))
            .fold(0.0, f64::max);
        return Err(Error::Residual(format!(
            "imaginary part of determinant did not cancel (max coefficient {worst:.3e})"
        )));
    }
    Ok(det.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;
    use crate::poly::{rat_frac, Monomial};
    use crate::rng::SplitMix64;

    fn poly(s: &str) -> Polynomial {
        Polynomial::parse(s).unwrap()
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial(e.to_vec())
    }

    #[test]
    fn moment_table_of_one_is_zero() {
        let t = moment_table(&Polynomial::one(2), 0, 3).unwrap();
        for (_, v) in t.entries() {
            assert!(v.is_zero());
        }
        assert_eq!(t.value(&Monomial::one(2)).unwrap(), rat_i64(0));
    }

    #[test]
    fn moment_table_matches_dirac_for_two_points() {
        // p = (1+x1)(1+2x1): moments are power sums 1^k + 2^k.
        let p = poly("1 + 3*x1 + 2*x1^2");
        let t = moment_table(&p, 2, 3).unwrap();
        assert_eq!(t.value(&mono(&[1])).unwrap(), rat_i64(3));
        assert_eq!(t.value(&mono(&[2])).unwrap(), rat_i64(5));
        assert_eq!(t.value(&mono(&[3])).unwrap(), rat_i64(9));
        let support =
            DiracSupport::new(1, vec![vec![rat_i64(1)], vec![rat_i64(2)]]).unwrap();
        for m in monomials_up_to(1, 3) {
            let q = Polynomial::from_terms(1, [(m.clone(), Rat::one())]);
            let d = dirac_moments(&support, &q).unwrap();
            if m.is_one() {
                assert_eq!(d, rat_i64(2));
            } else {
                assert_eq!(t.value(&m).unwrap(), d);
            }
        }
    }

    #[test]
    fn moment_table_unit_disk() {
        let p = poly("1 - x1^2 - x2^2");
        let t = moment_table(&p, 2, 3).unwrap();
        assert_eq!(t.value(&mono(&[1, 0])).unwrap(), rat_i64(0));
        assert_eq!(t.value(&mono(&[0, 1])).unwrap(), rat_i64(0));
        assert_eq!(t.value(&mono(&[2, 0])).unwrap(), rat_i64(2));
        assert_eq!(t.value(&mono(&[0, 2])).unwrap(), rat_i64(2));
        assert_eq!(t.value(&mono(&[1, 1])).unwrap(), rat_i64(0));
        for m in monomials_up_to(2, 3) {
            if m.degree() == 3 {
                assert!(t.value(&m).unwrap().is_zero(), "cubic moment {m}");
            }
        }
    }

    #[test]
    fn moment_table_rejects_zero_at_origin() {
        assert!(matches!(
            moment_table(&poly("x1"), 1, 3),
            Err(Error::ZeroAtOrigin)
        ));
    }

    #[test]
    fn closed_form_examples() {
        // Single Dirac point at 3: L(x1) = 3, L(x1^2) = 9, L(x1^3) = 27.
        let p = poly("1 + 3*x1");
        let t = cubic_moments_closed_form(&p, 1).unwrap();
        assert_eq!(t.value(&mono(&[1])).unwrap(), rat_i64(3));
        assert_eq!(t.value(&mono(&[2])).unwrap(), rat_i64(9));
        assert_eq!(t.value(&mono(&[3])).unwrap(), rat_i64(27));
        // Constant polynomial: all moments vanish.
        let t = cubic_moments_closed_form(&poly("5"), 0).unwrap();
        for (_, v) in t.entries() {
            assert!(v.is_zero());
        }
        // Unit disk agrees with the series table.
        let disk = poly("1 - x1^2 - x2^2");
        assert_eq!(
            cubic_moments_closed_form(&disk, 2).unwrap(),
            moment_table(&disk, 2, 3).unwrap()
        );
    }

    #[test]
    fn closed_form_matches_series_on_random_polynomials() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..500 {
            let n = rng.range_i64(1, 5) as usize;
            let deg = rng.range_i64(1, 5) as u32;
            let mut p = Polynomial::one(n);
            for m in monomials_up_to(n, deg) {
                if m.is_one() {
                    continue;
                }
                if rng.next_f64() < 0.5 {
                    p.add_term(m, rng.rat(2, 2));
                }
            }
            let d = p.degree().unwrap_or(0).max(1);
            let series = moment_table(&p, d, 3).unwrap();
            let closed = cubic_moments_closed_form(&p, d).unwrap();
            assert_eq!(series, closed, "mismatch for p = {p}");
        }
    }

    #[test]
    fn moment_apply_examples() {
        let p = poly("1 + 3*x1 + 2*x1^2");
        let t = moment_table(&p, 2, 3).unwrap();
        // q = 1 evaluates to the virtual degree.
        assert_eq!(moment_apply(&t, &Polynomial::one(1)).unwrap(), rat_i64(2));
        // q = (1+x1)^2: sum over Dirac points (1+1)^2 + (1+2)^2 = 13.
        let q = poly("1 + 2*x1 + x1^2");
        assert_eq!(moment_apply(&t, &q).unwrap(), rat_i64(13));
        // Degree above the cutoff is rejected.
        assert!(moment_apply(&t, &poly("x1^4")).is_err());
        // Unit disk: L(x1 x2) = 0.
        let disk = poly("1 - x1^2 - x2^2");
        let t = moment_table(&disk, 2, 3).unwrap();
        assert_eq!(moment_apply(&t, &poly("x1*x2")).unwrap(), rat_i64(0));
    }

    #[test]
    fn dirac_examples() {
        let empty = DiracSupport::new(1, vec![]).unwrap();
        assert_eq!(dirac_moments(&empty, &poly("x1")).unwrap(), rat_i64(0));
        assert_eq!(
            dirac_moments(&empty, &Polynomial::parse_with_vars("1", 1).unwrap()).unwrap(),
            rat_i64(0)
        );
        let two = DiracSupport::new(1, vec![vec![rat_i64(1)], vec![rat_i64(2)]]).unwrap();
        assert_eq!(dirac_moments(&two, &poly("x1^3")).unwrap(), rat_i64(9));
        let axes = DiracSupport::new(
            2,
            vec![vec![rat_i64(1), rat_i64(0)], vec![rat_i64(0), rat_i64(1)]],
        )
        .unwrap();
        assert_eq!(dirac_moments(&axes, &poly("x1*x2")).unwrap(), rat_i64(0));
    }

    #[test]
    fn product_rule_on_samples() {
        // L_{pq, d+e} = L_{p,d} + L_{q,e} entrywise.
        let mut rng = SplitMix64::new(32);
        for _ in 0..60 {
            let n = rng.range_i64(1, 3) as usize;
            let mut p = Polynomial::one(n);
            let mut q = Polynomial::one(n);
            for m in monomials_up_to(n, 2) {
                if m.is_one() {
                    continue;
                }
                p.add_term(m.clone(), rng.rat(2, 2));
                q.add_term(m, rng.rat(2, 2));
            }
            let tp = moment_table(&p, 2, 4).unwrap();
            let tq = moment_table(&q, 3, 4).unwrap();
            let tpq = moment_table(&p.mul(&q), 5, 4).unwrap();
            assert_eq!(tpq, tp.add(&tq).unwrap());
        }
    }

    #[test]
    fn rotation_invariance_float() {
        // L_{p(Ux),d}(q(Ux)) = L_{p,d}(q) within 1e-9 for sampled
        // orthogonal U.
        let mut rng = SplitMix64::new(33);
        for _ in 0..25 {
            let theta = rng.range_f64(0.0, std::f64::consts::TAU);
            let u = vec![
                vec![theta.cos(), -theta.sin()],
                vec![theta.sin(), theta.cos()],
            ];
            let mut p = Polynomial::one(2);
            for m in monomials_up_to(2, 3) {
                if m.is_one() {
                    continue;
                }
                p.add_term(m, rng.small_rat(-2, 2));
            }
            let pu = p.rotate_f64(&u).unwrap();
            let tp = moment_table(&p, 3, 3).unwrap();
            let tpu = moment_table(&pu, 3, 3).unwrap();
            for m in monomials_up_to(2, 3) {
                if m.degree() == 0 {
                    continue;
                }
                let q = Polynomial::from_terms(2, [(m.clone(), Rat::one())]);
                let qu = q.rotate_f64(&u).unwrap();
                let lhs = rat_to_f64(&moment_apply(&tpu, &qu).unwrap());
                let rhs = rat_to_f64(&moment_apply(&tp, &q).unwrap());
                assert!((lhs - rhs).abs() <= 1e-9, "{m}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn transform_rule_exact() {
        // L_{p[a],d}(f) = L_{p,d}(f(x+a)), exactly in rationals.
        let mut rng = SplitMix64::new(34);
        for _ in 0..40 {
            let n = rng.range_i64(1, 3) as usize;
            let mut p = Polynomial::one(n);
            for m in monomials_up_to(n, 3) {
                if m.is_one() {
                    continue;
                }
                p.add_term(m, rng.rat(2, 2));
            }
            let d = p.degree().unwrap_or(0).max(1);
            let a: Vec<Rat> = (0..n).map(|_| rng.rat(1, 2)).collect();
            let pa = p.a_transform(&a).unwrap();
            let tp = moment_table(&p, d, 3).unwrap();
            let tpa = moment_table(&pa, d, 3).unwrap();
            for m in monomials_up_to(n, 3) {
                let f = Polynomial::from_terms(n, [(m.clone(), Rat::one())]);
                let lhs = moment_apply(&tpa, &f).unwrap();
                let rhs = moment_apply(&tp, &f.shift(&a).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "monomial {m}");
            }
        }
    }

    #[test]
    fn restriction_is_subtable() {
        let mut rng = SplitMix64::new(35);
        for _ in 0..30 {
            let n = rng.range_i64(2, 4) as usize;
            let m_keep = rng.range_i64(1, n as i64 - 1) as usize;
            let mut p = Polynomial::one(n);
            for mo in monomials_up_to(n, 3) {
                if mo.is_one() {
                    continue;
                }
                p.add_term(mo, rng.rat(2, 2));
            }
            let r = p.restrict_vars(m_keep).unwrap();
            let tq = moment_table(&p, 4, 3).unwrap();
            let tr = moment_table(&r, 4, 3).unwrap();
            assert_eq!(tq.restrict_vars(m_keep).unwrap(), tr);
        }
    }

    #[test]
    fn hurwitz_small_cases() {
        let a1 = HermitianMatrix::from_symmetric(
            SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -1.0]]).unwrap(),
        );
        let a2 = HermitianMatrix::from_symmetric(
            SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 3.0]]).unwrap(),
        );
        let mats = vec![a1.clone(), a2.clone()];
        // alpha = e_1 gives back A_1.
        let h = hurwitz_product(&mats, &mono(&[1, 0])).unwrap();
        assert_eq!(h, a1);
        // alpha = 0 gives the identity.
        let h = hurwitz_product(&mats, &mono(&[0, 0])).unwrap();
        assert_eq!(h.re(), &SymmetricMatrix::identity(2));
        // alpha = (1,1) gives A1 A2 + A2 A1.
        let h = hurwitz_product(&mats, &mono(&[1, 1])).unwrap();
        let c1 = a1.to_cmat().mul(&a2.to_cmat());
        let c2 = a2.to_cmat().mul(&a1.to_cmat());
        for i in 0..2 {
            for j in 0..2 {
                let expect = c1.re[(i, j)] + c2.re[(i, j)];
                assert!((h.re_entry(i, j) - expect).abs() < 1e-12);
            }
        }
        // alpha = (2,1): direct enumeration of the three words.
        let h = hurwitz_product(&mats, &mono(&[2, 1])).unwrap();
        let m1 = a1.to_cmat().mul(&a1.to_cmat()).mul(&a2.to_cmat());
        let m2 = a1.to_cmat().mul(&a2.to_cmat()).mul(&a1.to_cmat());
        let m3 = a2.to_cmat().mul(&a1.to_cmat()).mul(&a1.to_cmat());
        for i in 0..2 {
            for j in 0..2 {
                let expect = m1.re[(i, j)] + m2.re[(i, j)] + m3.re[(i, j)];
                assert!((h.re_entry(i, j) - expect).abs() < 1e-12);
            }
        }
        // Degree cap.
        assert!(matches!(
            hurwitz_product(&mats, &mono(&[4, 3])),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn detrep_moment_traces() {
        let a1 = HermitianMatrix::from_symmetric(SymmetricMatrix::diagonal(&[1.0, -2.0]));
        let a2 = HermitianMatrix::from_symmetric(
            SymmetricMatrix::from_rows(&[vec![0.5, 1.0], vec![1.0, 0.0]]).unwrap(),
        );
        let rep = DetRep::new(vec![a1.clone(), a2.clone()]).unwrap();
        // L(x_i) = tr(A_i).
        assert!((detrep_moment(&rep, &mono(&[1, 0])).unwrap() - (-1.0)).abs() < 1e-12);
        // L(x_i x_j) = tr(A_i A_j).
        let prod = a1.to_cmat().mul(&a2.to_cmat());
        let expect = prod.re.trace();
        assert!((detrep_moment(&rep, &mono(&[1, 1])).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn detrep_moment_diagonal_matches_dirac() {
        // Diagonal coefficients reduce to Dirac sums over the diagonals.
        let a1 = HermitianMatrix::from_symmetric(SymmetricMatrix::diagonal(&[1.0, 2.0]));
        let a2 = HermitianMatrix::from_symmetric(SymmetricMatrix::diagonal(&[-1.0, 0.5]));
        let rep = DetRep::new(vec![a1, a2]).unwrap();
        let support = DiracSupport::new(
            2,
            vec![
                vec![rat_i64(1), rat_i64(-1)],
                vec![rat_i64(2), rat_frac(1, 2)],
            ],
        )
        .unwrap();
        for m in monomials_up_to(2, 3) {
            if m.is_one() {
                continue;
            }
            let q = Polynomial::from_terms(2, [(m.clone(), Rat::one())]);
            let lhs = detrep_moment(&rep, &m).unwrap();
            let rhs = rat_to_f64(&dirac_moments(&support, &q).unwrap());
            assert!((lhs - rhs).abs() < 1e-10, "monomial {m}");
        }
    }

    #[test]
    fn detrep_expand_examples() {
        // A1 = diag(-1, 1), A2 = [[0,1],[1,0]] expands to the unit disk.
        let a1 = HermitianMatrix::from_symmetric(SymmetricMatrix::diagonal(&[-1.0, 1.0]));
        let a2 = HermitianMatrix::from_symmetric(
            SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        );
        let rep = DetRep::new(vec![a1, a2]).unwrap();
        assert_eq!(detrep_expand(&rep).unwrap(), poly("1 - x1^2 - x2^2"));
        // All-zero coefficients expand to 1.
        let rep = DetRep::new(vec![
            HermitianMatrix::from_symmetric(SymmetricMatrix::zeros(3)),
            HermitianMatrix::from_symmetric(SymmetricMatrix::zeros(3)),
        ])
        .unwrap();
        assert_eq!(detrep_expand(&rep).unwrap(), Polynomial::one(2));
        // Diagonal coefficients expand to the product over the diagonal.
        let a1 = HermitianMatrix::from_symmetric(SymmetricMatrix::diagonal(&[2.0, -1.0]));
        let a2 = HermitianMatrix::from_symmetric(SymmetricMatrix::diagonal(&[0.0, 3.0]));
        let rep = DetRep::new(vec![a1, a2]).unwrap();
        let expect = Polynomial::parse_with_vars("1 + 2*x1", 2)
            .unwrap()
            .mul(&Polynomial::parse_with_vars("1 - x1 + 3*x2", 2).unwrap());
        assert_eq!(detrep_expand(&rep).unwrap(), expect);
    }

    #[test]
    fn detrep_expansion_agrees_with_hurwitz_moments() {
        // moment_table(detrep_expand(R)) equals detrep_moment(R, .) within
        // 1e-9 for random Hermitian representations with dyadic entries.
        let mut rng = SplitMix64::new(36);
        for _ in 0..40 {
            let d = rng.range_i64(1, 3) as usize;
            let n = rng.range_i64(1, 3) as usize;
            let mut coeffs = Vec::new();
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
                coeffs.push(HermitianMatrix::from_parts(re, &im).unwrap());
            }
            let rep = DetRep::new(coeffs).unwrap();
            let p = detrep_expand(&rep).unwrap();
            let table = moment_table(&p, d as u32, 3).unwrap();
            for m in monomials_up_to(n, 3) {
                if m.is_one() {
                    continue;
                }
                let series = rat_to_f64(&table.value(&m).unwrap());
                let trace = detrep_moment(&rep, &m).unwrap();
                assert!(
                    (series - trace).abs() <= 1e-9,
                    "monomial {m}: {series} vs {trace}"
                );
            }
        }
    }
}
