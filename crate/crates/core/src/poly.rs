//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A polynomial is stored as a map from exponent vectors to nonzero
//! `BigRational` coefficients. All arithmetic is exact; floating point only
//! appears in the dedicated `eval` / `line_coeffs_f64` evaluation helpers.
//!
//! The canonical term order is graded lexicographic with `x1 > x2 > ...`:
//! terms are compared by total degree first and lexicographically by
//! exponent vector inside a degree. Printing lists terms in descending
//! graded-lex order, so `1 - x1^2 - x2^2` prints exactly like that.
//!
//! Degree caps are deliberately desk-scale: at most [`MAX_VARS`] variables
//! and series cutoffs up to [`MAX_SERIES_CUTOFF`]; larger requests are
//! rejected with a capacity error.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational coefficient type used across the crate.
pub type Rat = BigRational;

/// Maximum supported number of variables.
pub const MAX_VARS: usize = 16;

/// Maximum supported truncation cutoff for power series operations.
pub const MAX_SERIES_CUTOFF: u32 = 12;

pub fn rat_i64(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Exact conversion of a finite `f64` (every finite double is dyadic).
pub fn rat_from_f64(x: f64) -> Result<Rat> {
    Rat::from_float(x).ok_or(Error::NonFinite("rational conversion"))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parse a rational literal: `p/q`, an integer, or a decimal converted
/// exactly (`0.25` becomes `1/4`).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator `{num}`")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator `{den}`")))?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int = if int.is_empty() || int == "-" || int == "+" {
            format!("{int}0")
        } else {
            int.to_string()
        };
        let i: BigInt = int
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal `{s}`")))?;
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal `{s}`")));
        }
        let f: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse()
                .map_err(|_| Error::Parse(format!("bad decimal `{s}`")))?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let sign = if s.trim_start().starts_with('-') {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        return Ok(Rat::new(&i * &scale + sign * f, scale));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    Ok(Rat::from(n))
}

// ---------------------------------------------------------------------------
// Monomial
// ---------------------------------------------------------------------------

/// Exponent vector of a monomial `x^a = x1^{a_1} ... xn^{a_n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars])
    }

    /// `x_{var}` (zero-based index) among `n_vars` variables.
    pub fn var(n_vars: usize, var: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[var] = 1;
        Monomial(e)
    }

    pub fn n_vars(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|a|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Multinomial coefficient `|a|! / (a_1! ... a_n!)`.
    pub fn multinomial(&self) -> BigInt {
        let mut result = BigInt::one();
        let mut seen = 0u32;
        for &e in &self.0 {
            for k in 1..=e {
                seen += 1;
                result = result * BigInt::from(seen) / BigInt::from(k);
            }
        }
        result
    }
}

impl Ord for Monomial {
    /// Graded lexicographic with `x1 > x2 > ...`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

/// All monomials in `n` variables of degree at most `d`, listed by ascending
/// degree and, inside a degree, descending lexicographically (so the basis
/// starts `1, x1, x2, ..., xn, x1^2, x1*x2, ...`). This is the fixed order
/// used to index hierarchy pencils.
pub fn monomials_up_to(n_vars: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut level = Vec::new();
        gen_fixed_degree(n_vars, deg, &mut vec![0; n_vars], 0, &mut level);
        level.sort_by(|a: &Monomial, b: &Monomial| b.0.cmp(&a.0));
        out.extend(level);
    }
    out
}

fn gen_fixed_degree(
    n_vars: usize,
    remaining: u32,
    current: &mut Vec<u32>,
    pos: usize,
    out: &mut Vec<Monomial>,
) {
    if pos == n_vars {
        if remaining == 0 {
            out.push(Monomial(current.clone()));
        }
        return;
    }
    if pos + 1 == n_vars {
        current[pos] = remaining;
        out.push(Monomial(current.clone()));
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        gen_fixed_degree(n_vars, remaining - e, current, pos + 1, out);
        current[pos] = 0;
    }
}

// ---------------------------------------------------------------------------
// Polynomial
// ---------------------------------------------------------------------------

/// Sparse multivariate polynomial over the rationals.
///
/// Invariant: no zero coefficients are stored; the degree of the zero
/// polynomial is the sentinel `None` (standing in for minus infinity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    n_vars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero(n_vars: usize) -> Self {
        Polynomial {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: Rat) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(Monomial::one(n_vars), c);
        p
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, Rat::one())
    }

    /// The variable `x_{var}` (zero-based).
    pub fn var(n_vars: usize, var: usize) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(Monomial::var(n_vars, var), Rat::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rat)>>(n_vars: usize, it: I) -> Self {
        let mut p = Self::zero(n_vars);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` is the minus-infinity sentinel of the zero
    /// polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Constant coefficient `p(0)`.
    pub fn constant_term(&self) -> Rat {
        self.coeff(&Monomial::one(self.n_vars))
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        debug_assert_eq!(m.n_vars(), self.n_vars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n_vars, other.n_vars);
        let mut out = Self::zero(self.n_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Product with all result terms above total degree `cutoff` dropped.
    pub fn mul_truncated(&self, other: &Self, cutoff: u32) -> Self {
        debug_assert_eq!(self.n_vars, other.n_vars);
        let mut out = Self::zero(self.n_vars);
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            if d1 > cutoff {
                continue;
            }
            for (m2, c2) in &other.terms {
                if d1 + m2.degree() > cutoff {
                    continue;
                }
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.n_vars);
        }
        Polynomial {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.n_vars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Evaluate at a rational point, exactly.
    pub fn eval_rat(&self, a: &[Rat]) -> Result<Rat> {
        if a.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: a.len(),
            });
        }
        let mut sum = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &a[i];
                }
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Evaluate at a floating point vector.
    pub fn eval(&self, a: &[f64]) -> Result<f64> {
        if a.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: a.len(),
            });
        }
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut t = rat_to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                t *= a[i].powi(e as i32);
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Partial derivative with respect to variable `var` (zero-based).
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut em = m.clone();
            em.0[var] = e - 1;
            out.add_term(em, c * rat_i64(e as i64));
        }
        out
    }

    /// Substitute the rational value `val` for variable `var`, keeping the
    /// variable count (the variable no longer occurs in the result).
    pub fn eval_var(&self, var: usize, val: &Rat) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] = 0;
            let mut c2 = c.clone();
            for _ in 0..e {
                c2 *= val;
            }
            out.add_term(m2, c2);
        }
        out
    }

    /// Remove variable `var`; every term must have exponent zero there.
    pub fn drop_var(&self, var: usize) -> Self {
        let mut out = Self::zero(self.n_vars - 1);
        for (m, c) in &self.terms {
            assert_eq!(m.0[var], 0, "dropping an occurring variable");
            let mut e = m.0.clone();
            e.remove(var);
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Reinterpret in `new_n_vars` variables, mapping old variable `i` to
    /// `mapping[i]`.
    pub fn remap_vars(&self, mapping: &[usize], new_n_vars: usize) -> Self {
        assert_eq!(mapping.len(), self.n_vars);
        let mut out = Self::zero(new_n_vars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; new_n_vars];
            for (i, &exp) in m.0.iter().enumerate() {
                e[mapping[i]] += exp;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// General substitution `p(subs[0], ..., subs[n-1])`. All substituted
    /// polynomials must share a variable count, which becomes the result's.
    pub fn compose(&self, subs: &[Polynomial]) -> Self {
        assert_eq!(subs.len(), self.n_vars);
        let out_vars = subs.first().map_or(0, |s| s.n_vars());
        // Memoized powers of each substituted polynomial.
        let mut powers: Vec<Vec<Polynomial>> = subs
            .iter()
            .map(|s| vec![Polynomial::one(out_vars), s.clone()])
            .collect();
        let mut out = Self::zero(out_vars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(out_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let last = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(last);
                }
                term = term.mul(&powers[i][e as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// `p(-x)`: negate every variable, flipping the sign of odd-degree
    /// terms.
    pub fn negate_variables(&self) -> Self {
        Polynomial {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let c = if m.degree() % 2 == 1 {
                        -c.clone()
                    } else {
                        c.clone()
                    };
                    (m.clone(), c)
                })
                .collect(),
        }
    }

    // -- transforms ---------------------------------------------------------

    /// Keep the terms of total degree at most `d`.
    pub fn truncate(&self, d: u32) -> Self {
        Polynomial {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Homogenization to degree `d` with a fresh variable `x0` prepended:
    /// `x0^{d - deg p} p*`. The zero polynomial homogenizes to zero.
    pub fn homogenize(&self, d: u32) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero(self.n_vars + 1));
        }
        let deg = self.degree().unwrap();
        if d < deg {
            return Err(Error::DegreeTooSmall {
                degree: d,
                poly_degree: deg,
            });
        }
        let mut out = Self::zero(self.n_vars + 1);
        for (m, c) in &self.terms {
            let mut e = Vec::with_capacity(self.n_vars + 1);
            e.push(d - m.degree());
            e.extend_from_slice(&m.0);
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Set the first variable to `1` and drop it; inverse of `homogenize` on
    /// homogeneous input.
    pub fn dehomogenize(&self) -> Self {
        assert!(self.n_vars >= 1);
        let mut out = Self::zero(self.n_vars - 1);
        for (m, c) in &self.terms {
            out.add_term(Monomial(m.0[1..].to_vec()), c.clone());
        }
        out
    }

    /// The a-transform `p[a] = p*(1 + a^T x, x)`.
    pub fn a_transform(&self, a: &[Rat]) -> Result<Self> {
        if a.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: a.len(),
            });
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let hom = self.homogenize(self.degree().unwrap())?;
        let mut subs = Vec::with_capacity(self.n_vars + 1);
        let mut lin = Polynomial::one(self.n_vars);
        for (i, ai) in a.iter().enumerate() {
            lin.add_term(Monomial::var(self.n_vars, i), ai.clone());
        }
        subs.push(lin);
        for i in 0..self.n_vars {
            subs.push(Polynomial::var(self.n_vars, i));
        }
        Ok(hom.compose(&subs))
    }

    /// The shifted polynomial `p(x + a)`.
    pub fn shift(&self, a: &[Rat]) -> Result<Self> {
        if a.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: a.len(),
            });
        }
        let subs: Vec<Polynomial> = (0..self.n_vars)
            .map(|i| {
                let mut s = Polynomial::var(self.n_vars, i);
                s.add_term(Monomial::one(self.n_vars), a[i].clone());
                s
            })
            .collect();
        Ok(self.compose(&subs))
    }

    /// `p(Ux)` for an exactly orthogonal rational matrix `U` (rows of `u`).
    pub fn rotate(&self, u: &[Vec<Rat>]) -> Result<Self> {
        let n = self.n_vars;
        check_rat_orthogonal(u, n)?;
        let subs: Vec<Polynomial> = (0..n)
            .map(|i| {
                Polynomial::from_terms(
                    n,
                    (0..n).map(|j| (Monomial::var(n, j), u[i][j].clone())),
                )
            })
            .collect();
        Ok(self.compose(&subs))
    }

    /// `p(Ux)` for a floating point matrix, orthogonal within `1e-10` in
    /// Frobenius norm; entries are converted to rationals exactly.
    pub fn rotate_f64(&self, u: &[Vec<f64>]) -> Result<Self> {
        let n = self.n_vars;
        check_f64_orthogonal(u, n, 1e-10)?;
        let rows: Vec<Vec<Rat>> = u
            .iter()
            .map(|row| row.iter().map(|&x| rat_from_f64(x)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let subs: Vec<Polynomial> = (0..n)
            .map(|i| {
                Polynomial::from_terms(
                    n,
                    (0..n).map(|j| (Monomial::var(n, j), rows[i][j].clone())),
                )
            })
            .collect();
        Ok(self.compose(&subs))
    }

    /// `p(x_1, ..., x_m, 0, ..., 0)` as a polynomial in `m` variables.
    pub fn restrict_vars(&self, m: usize) -> Result<Self> {
        if m > self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: m,
            });
        }
        let mut out = Self::zero(m);
        for (mo, c) in &self.terms {
            if mo.0[m..].iter().all(|&e| e == 0) {
                out.add_term(Monomial(mo.0[..m].to_vec()), c.clone());
            }
        }
        Ok(out)
    }

    /// The univariate restriction `t -> p(t a)`, exactly.
    pub fn restrict_line(&self, a: &[Rat]) -> Result<Self> {
        if a.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: a.len(),
            });
        }
        let mut out = Self::zero(1);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    coeff *= &a[i];
                }
            }
            out.add_term(Monomial(vec![m.degree()]), coeff);
        }
        Ok(out)
    }

    /// Coefficients of `t -> p(t a)` in floating point, index = degree.
    pub fn line_coeffs_f64(&self, a: &[f64]) -> Result<Vec<f64>> {
        if a.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: a.len(),
            });
        }
        let deg = self.degree().unwrap_or(0) as usize;
        let mut coeffs = vec![0.0; deg + 1];
        for (m, c) in &self.terms {
            let mut t = rat_to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                t *= a[i].powi(e as i32);
            }
            coeffs[m.degree() as usize] += t;
        }
        Ok(coeffs)
    }

    // -- parsing / printing -------------------------------------------------

    /// Parse the textual grammar: signed terms that are products of a
    /// rational or decimal coefficient and powers `x<i>^<e>`, separated by
    /// `*`. The variable count is the largest index that occurs.
    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_impl(s, None)
    }

    /// Parse with an explicit ambient variable count.
    pub fn parse_with_vars(s: &str, n_vars: usize) -> Result<Self> {
        Self::parse_impl(s, Some(n_vars))
    }

    fn parse_impl(s: &str, forced_vars: Option<usize>) -> Result<Self> {
        let raw_terms = split_signed_terms(s)?;
        let mut parsed: Vec<(Rat, Vec<(usize, u32)>)> = Vec::new();
        let mut max_var = 0usize;
        for (sign, body) in raw_terms {
            let (coeff, powers) = parse_term(&body)?;
            for &(v, _) in &powers {
                max_var = max_var.max(v + 1);
            }
            parsed.push((if sign { -coeff } else { coeff }, powers));
        }
        let n_vars = forced_vars.unwrap_or(max_var);
        if n_vars > MAX_VARS {
            return Err(Error::Capacity(format!(
                "{n_vars} variables exceeds the cap of {MAX_VARS}"
            )));
        }
        let mut p = Self::zero(n_vars);
        for (coeff, powers) in parsed {
            let mut e = vec![0u32; n_vars];
            for (v, exp) in powers {
                if v >= n_vars {
                    return Err(Error::Parse(format!(
                        "variable x{} outside ambient dimension {}",
                        v + 1,
                        n_vars
                    )));
                }
                e[v] += exp;
            }
            p.add_term(Monomial(e), coeff);
        }
        Ok(p)
    }
}

fn check_rat_orthogonal(u: &[Vec<Rat>], n: usize) -> Result<()> {
    if u.len() != n || u.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.len(),
        });
    }
    for i in 0..n {
        for j in 0..n {
            let mut dot = Rat::zero();
            for (ri, rj) in u.iter().map(|r| (&r[i], &r[j])) {
                dot += ri * rj;
            }
            let target = if i == j { Rat::one() } else { Rat::zero() };
            if dot != target {
                return Err(Error::NotOrthogonal(rat_to_f64(&(dot - target)).abs()));
            }
        }
    }
    Ok(())
}

fn check_f64_orthogonal(u: &[Vec<f64>], n: usize, tol: f64) -> Result<()> {
    if u.len() != n || u.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.len(),
        });
    }
    let mut residual = 0.0;
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = u.iter().map(|r| r[i] * r[j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            residual += (dot - target) * (dot - target);
        }
    }
    let residual = residual.sqrt();
    if residual > tol {
        return Err(Error::NotOrthogonal(residual));
    }
    Ok(())
}

/// Split into `(is_negative, body)` pieces on top-level `+` / `-`.
fn split_signed_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut sign = false;
    let mut seen_any = false;
    let mut prev_nonspace: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '+' | '-' if prev_nonspace != Some('/') && prev_nonspace != Some('^') => {
                if current.trim().is_empty() && !seen_any {
                    // Leading sign.
                    sign = ch == '-';
                    seen_any = true;
                } else if current.trim().is_empty() {
                    return Err(Error::Parse("consecutive signs".into()));
                } else {
                    terms.push((sign, current.trim().to_string()));
                    current = String::new();
                    sign = ch == '-';
                }
                prev_nonspace = Some(ch);
            }
            _ => {
                if !ch.is_whitespace() {
                    prev_nonspace = Some(ch);
                    seen_any = true;
                }
                current.push(ch);
            }
        }
    }
    if current.trim().is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    terms.push((sign, current.trim().to_string()));
    Ok(terms)
}

/// Parse one unsigned term: factors separated by `*`, each a rational
/// literal or `x<i>[^<e>]`.
fn parse_term(body: &str) -> Result<(Rat, Vec<(usize, u32)>)> {
    let mut coeff = Rat::one();
    let mut powers: Vec<(usize, u32)> = Vec::new();
    for factor in body.split('*') {
        let f = factor.trim();
        if f.is_empty() {
            return Err(Error::Parse(format!("empty factor in `{body}`")));
        }
        if let Some(rest) = f.strip_prefix('x') {
            let (var_s, exp_s) = match rest.split_once('^') {
                Some((v, e)) => (v, Some(e)),
                None => (rest, None),
            };
            let var: usize = var_s
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable `{f}`")))?;
            if var == 0 {
                return Err(Error::Parse("variables are numbered from x1".into()));
            }
            let exp: u32 = match exp_s {
                Some(e) => e
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent `{f}`")))?,
                None => 1,
            };
            powers.push((var - 1, exp));
        } else {
            coeff *= parse_rat(f)?;
        }
    }
    Ok((coeff, powers))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Descending graded-lex: highest degree first, x1-heavy first.
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Truncated power series
// ---------------------------------------------------------------------------

/// A power series known modulo terms of degree greater than `cutoff`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    poly: Polynomial,
    cutoff: u32,
}

impl TruncatedSeries {
    pub fn new(poly: Polynomial, cutoff: u32) -> Self {
        TruncatedSeries {
            poly: poly.truncate(cutoff),
            cutoff,
        }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn as_poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_poly(self) -> Polynomial {
        self.poly
    }

    pub fn add(&self, other: &Self) -> Self {
        let cutoff = self.cutoff.min(other.cutoff);
        Self::new(self.poly.add(&other.poly), cutoff)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cutoff = self.cutoff.min(other.cutoff);
        Self::new(self.poly.mul_truncated(&other.poly, cutoff), cutoff)
    }
}

fn check_cutoff(d: u32) -> Result<()> {
    if d > MAX_SERIES_CUTOFF {
        return Err(Error::Capacity(format!(
            "series cutoff {d} exceeds the cap of {MAX_SERIES_CUTOFF}"
        )));
    }
    Ok(())
}

/// Truncated logarithm `trunc_D sum_{k=1..D} (-1)^{k+1}/k (p-1)^k`.
/// Requires constant coefficient exactly 1.
pub fn log_series(p: &Polynomial, cutoff: u32) -> Result<TruncatedSeries> {
    check_cutoff(cutoff)?;
    if !p.constant_term().is_one() {
        return Err(Error::ConstantTermNotOne(p.constant_term().to_string()));
    }
    let q = {
        let mut q = p.truncate(cutoff);
        q.add_term(Monomial::one(p.n_vars()), -Rat::one());
        q
    };
    let mut acc = Polynomial::zero(p.n_vars());
    let mut qk = Polynomial::one(p.n_vars());
    for k in 1..=cutoff {
        qk = qk.mul_truncated(&q, cutoff);
        if qk.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { Rat::one() } else { -Rat::one() };
        acc = acc.add(&qk.scale(&(sign / rat_i64(k as i64))));
    }
    Ok(TruncatedSeries::new(acc, cutoff))
}

/// Truncated exponential `trunc_D sum_{k=0..D} p^k / k!`.
/// Requires constant coefficient exactly 0.
pub fn exp_series(p: &Polynomial, cutoff: u32) -> Result<TruncatedSeries> {
    check_cutoff(cutoff)?;
    if !p.constant_term().is_zero() {
        return Err(Error::ConstantTermNotZero(p.constant_term().to_string()));
    }
    let q = p.truncate(cutoff);
    let mut acc = Polynomial::one(p.n_vars());
    let mut qk = Polynomial::one(p.n_vars());
    let mut factorial = Rat::one();
    for k in 1..=cutoff {
        qk = qk.mul_truncated(&q, cutoff);
        if qk.is_zero() {
            break;
        }
        factorial *= rat_i64(k as i64);
        acc = acc.add(&qk.scale(&(Rat::one() / &factorial)));
    }
    Ok(TruncatedSeries::new(acc, cutoff))
}
