//! Real zero amalgamation in the three proven special cases.
//!
//! Two real zero polynomials `p(x, y)` and `q(x, z)` that agree after
//! setting the non-shared variables to zero are amalgamated into a real
//! zero polynomial `r(x, y, z)` with `r(x, y, 0) = p` and `r(x, 0, z) = q`:
//!
//! - no shared variables: the additive-convolution formula
//!   `r = (1/(d! p(0))) sum_i (d^i/dx0^i p~)|_{x0=1} (d^{d-i}/dx0^{d-i} q~)|_{x0=0}`
//!   on the degree-`d` homogenizations, a multivariate variant of the
//!   classical polynomial convolution that preserves real-rootedness;
//! - quadratics: a positive semidefinite completion of the block partial
//!   discriminant matrix (the pattern is chordal with the shared block as
//!   the unique separator, so the canonical completion
//!   `Y = M_yx M_xx^+ M_xz` works);
//! - one variable per block, degree at most two: glue the explicit planar
//!   determinantal representations after conjugating their shared
//!   coefficient matrices onto a common diagonal.
//!
//! Restriction identities are exact in rational arithmetic for the first
//! two constructions; the representation-gluing route passes through
//! orthogonal diagonalizations and is certified at `1e-7` coefficientwise.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{quadratic_parts, quadratic_rz_certificate, real_zero_probe};
use crate::linalg::{eig_sym, pinv_apply, SymmetricMatrix};
use crate::moments::{detrep_expand, DetRep};
use crate::poly::{rat_from_f64, rat_i64, Monomial, Polynomial, Rat};

/// Residual bound for the representation-gluing restrictions.
const GLUE_TOL: f64 = 1e-7;

// ---------------------------------------------------------------------------
// Problem container
// ---------------------------------------------------------------------------

/// An amalgamation instance: `p` lives in the shared block `x` (length
/// `shared`) plus its own block `y`, `q` in `x` plus `z`, and both restrict
/// to the same polynomial on `x`.
#[derive(Debug, Clone)]
pub struct AmalgamProblem {
    pub shared: usize,
    pub p: Polynomial,
    pub q: Polynomial,
    pub degree_bound: u32,
}

impl AmalgamProblem {
    pub fn new(shared: usize, p: Polynomial, q: Polynomial, degree_bound: u32) -> Result<Self> {
        if p.n_vars() < shared || q.n_vars() < shared {
            return Err(Error::DimensionMismatch {
                expected: shared,
                got: p.n_vars().min(q.n_vars()),
            });
        }
        for (name, poly) in [("p", &p), ("q", &q)] {
            if let Some(d) = poly.degree() {
                if d > degree_bound {
                    return Err(Error::DegreeBound {
                        got: d,
                        bound: degree_bound,
                    });
                }
            }
            if poly.constant_term().is_zero() {
                return Err(Error::SharedMismatch(format!(
                    "{name} vanishes at the origin"
                )));
            }
        }
        if p.restrict_vars(shared)? != q.restrict_vars(shared)? {
            return Err(Error::SharedMismatch(
                "restrictions to the shared block differ".into(),
            ));
        }
        Ok(AmalgamProblem {
            shared,
            p,
            q,
            degree_bound,
        })
    }

    /// Number of variables owned by `p` alone.
    pub fn own_p(&self) -> usize {
        self.p.n_vars() - self.shared
    }

    /// Number of variables owned by `q` alone.
    pub fn own_q(&self) -> usize {
        self.q.n_vars() - self.shared
    }

    /// Probabilistic real-zero check of both factors.
    pub fn verify_rz(&self, trials: u32, seed: u64) -> Result<bool> {
        Ok(real_zero_probe(&self.p, trials, 1e-7, seed)?.passed
            && real_zero_probe(&self.q, trials, 1e-7, seed ^ 0x5bd1)?.passed)
    }
}

// ---------------------------------------------------------------------------
// Disjoint variables: the convolution formula
// ---------------------------------------------------------------------------

/// Amalgamate real zero polynomials with no shared variables: `p` in `m`
/// variables, `q` in `n` variables, `p(0) = q(0) != 0`, degrees at most
/// `d`. The output lives in `m + n` variables (`p`'s block first) and
/// satisfies `r(y, 0) = p` and `r(0, z) = q` exactly.
pub fn amalgamate_disjoint(p: &Polynomial, q: &Polynomial, d: u32) -> Result<Polynomial> {
    let m = p.n_vars();
    let n = q.n_vars();
    for poly in [p, q] {
        if let Some(deg) = poly.degree() {
            if deg > d {
                return Err(Error::DegreeBound { got: deg, bound: d });
            }
        }
    }
    let p0 = p.constant_term();
    let q0 = q.constant_term();
    if p0.is_zero() || q0.is_zero() {
        return Err(Error::ZeroAtOrigin);
    }
    if p0 != q0 {
        return Err(Error::SharedMismatch(format!(
            "constant terms differ: {p0} vs {q0}"
        )));
    }
    let pn = p.scale(&(Rat::one() / &p0));
    let qn = q.scale(&(Rat::one() / &q0));
    // Degree-d homogenizations with x0 prepended.
    let pt = pn.homogenize(d)?;
    let qt = qn.homogenize(d)?;
    // Partial derivative towers in x0.
    let mut p_derivs = Vec::with_capacity(d as usize + 1);
    let mut q_derivs = Vec::with_capacity(d as usize + 1);
    let mut cur_p = pt;
    let mut cur_q = qt;
    for _ in 0..=d {
        p_derivs.push(cur_p.eval_var(0, &Rat::one()).drop_var(0));
        q_derivs.push(cur_q.eval_var(0, &Rat::zero()).drop_var(0));
        cur_p = cur_p.derivative(0);
        cur_q = cur_q.derivative(0);
    }
    // r = (1/d!) sum_i (d^i p~)|_{x0=1} (d^{d-i} q~)|_{x0=0}, embedded in
    // m + n variables.
    let total = m + n;
    let p_map: Vec<usize> = (0..m).collect();
    let q_map: Vec<usize> = (m..total).collect();
    let mut acc = Polynomial::zero(total);
    for i in 0..=(d as usize) {
        let left = p_derivs[i].remap_vars(&p_map, total);
        let right = q_derivs[d as usize - i].remap_vars(&q_map, total);
        acc = acc.add(&left.mul(&right));
    }
    let mut factorial = Rat::one();
    for k in 1..=d {
        factorial *= rat_i64(k as i64);
    }
    let r = acc.scale(&(p0 / factorial));
    debug_assert!(r.restrict_vars(m).unwrap() == *p);
    Ok(r)
}

// ---------------------------------------------------------------------------
// Univariate additive convolution
// ---------------------------------------------------------------------------

/// `sum_{i+j=d} f^(i)(x) g^(j)(y)` for univariate `f, g` of degree at most
/// `d`, collapsed to one variable: the bivariate sum is a polynomial in
/// `x + y`, and the returned `h` satisfies `h(x + y) = sum ...`. Preserves
/// real-rootedness.
pub fn additive_convolution_1d(f: &Polynomial, g: &Polynomial, d: u32) -> Result<Polynomial> {
    if f.n_vars() != 1 || g.n_vars() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.n_vars().max(g.n_vars()),
        });
    }
    for poly in [f, g] {
        if let Some(deg) = poly.degree() {
            if deg > d {
                return Err(Error::DegreeBound { got: deg, bound: d });
            }
        }
    }
    // Assemble the bivariate sum in variables (x, y).
    let mut fd = f.clone();
    let mut gs: Vec<Polynomial> = Vec::with_capacity(d as usize + 1);
    let mut cur = g.clone();
    for _ in 0..=d {
        gs.push(cur.clone());
        cur = cur.derivative(0);
    }
    let mut bivariate = Polynomial::zero(2);
    for i in 0..=(d as usize) {
        let left = fd.remap_vars(&[0], 2);
        let right = gs[d as usize - i].remap_vars(&[1], 2);
        bivariate = bivariate.add(&left.mul(&right));
        fd = fd.derivative(0);
    }
    // Collapse: the sum is a polynomial in x + y, so evaluate at y = 0.
    let h = bivariate.eval_var(1, &Rat::zero()).drop_var(1);
    // Certify the collapse h(x + y) = bivariate, exactly.
    let x_plus_y = Polynomial::from_terms(
        2,
        [
            (Monomial::var(2, 0), Rat::one()),
            (Monomial::var(2, 1), Rat::one()),
        ],
    );
    if h.compose(&[x_plus_y]) != bivariate {
        return Err(Error::Numerical(
            "convolution did not collapse to a polynomial in x + y".into(),
        ));
    }
    Ok(h)
}

// ---------------------------------------------------------------------------
// Quadratics: PSD completion
// ---------------------------------------------------------------------------

/// Amalgamate two quadratic real zero polynomials along their shared block
/// by completing the partial discriminant matrix.
///
/// The unknown `y`-`z` coupling of the completed discriminant is filled
/// with the canonical one-separator chordal completion
/// `Y = M_yx M_xx^+ M_xz`; when the shared block is singular and the
/// completed matrix fails its PSD check, the completion is retried with
/// diagonal perturbations of the shared block.
pub fn amalgamate_quadratic(prob: &AmalgamProblem) -> Result<Polynomial> {
    if prob.degree_bound != 2 {
        return Err(Error::DegreeBound {
            got: prob.degree_bound,
            bound: 2,
        });
    }
    let l = prob.shared;
    let m = prob.own_p();
    let n = prob.own_q();
    let total = l + m + n;
    let p0 = prob.p.constant_term();
    let pn = prob.p.scale(&(Rat::one() / &p0));
    let qn = prob.q.scale(&(Rat::one() / &p0));
    // Both discriminants must certify the real zero property.
    for (name, poly) in [("p", &pn), ("q", &qn)] {
        let (_, verdict) = quadratic_rz_certificate(poly)?;
        if verdict == crate::linalg::PsdVerdict::NotPsd {
            return Err(Error::SharedMismatch(format!(
                "{name} is not a quadratic real zero polynomial"
            )));
        }
    }
    if m == 0 {
        // Nothing to glue on p's side: q embedded is the amalgam.
        let qe = embed(&qn, &q_map(l, m, n), total);
        return Ok(qe.scale(&p0));
    }
    if n == 0 {
        let pe = embed(&pn, &p_map(l, m), total);
        return Ok(pe.scale(&p0));
    }
    // Discriminant blocks of the normalized factors.
    let (cert_p, _) = quadratic_rz_certificate(&pn)?;
    let (cert_q, _) = quadratic_rz_certificate(&qn)?;
    // Partial matrix in the (y, x, z) block order with the shared block in
    // the middle; the unknown corner couples y and z.
    let myx = |i: usize, j: usize| cert_p.get(l + i, j); // m x l
    let mxx = {
        let mut b = SymmetricMatrix::zeros(l);
        for i in 0..l {
            for j in i..l {
                b.set_sym(i, j, cert_p.get(i, j));
            }
        }
        b
    };
    let mxz: Vec<Vec<f64>> = (0..l)
        .map(|i| (0..n).map(|j| cert_q.get(i, l + j)).collect())
        .collect();
    let complete = |shift: f64| -> Result<Vec<Vec<f64>>> {
        // Y = M_yx (M_xx + shift I)^+ M_xz, column by column.
        let mut shifted = mxx.clone();
        for i in 0..l {
            shifted.set_sym(i, i, shifted.get(i, i) + shift);
        }
        let mut y = vec![vec![0.0; n]; m];
        for j in 0..n {
            let col: Vec<f64> = (0..l).map(|i| mxz[i][j]).collect();
            let solved = pinv_apply(&shifted, &col)?;
            for i in 0..m {
                let mut dot = 0.0;
                for (k, s) in solved.iter().enumerate() {
                    dot += myx(i, k) * s;
                }
                y[i][j] = dot;
            }
        }
        Ok(y)
    };
    let assemble = |y: &[Vec<f64>]| -> Result<Polynomial> {
        // r = p + q - shared + 2 y^T G z with G = (b c^T - Y)/4.
        let (_, bp) = quadratic_parts(&pn)?;
        let (_, cq) = quadratic_parts(&qn)?;
        let shared_poly = pn.restrict_vars(l)?;
        let shared_map: Vec<usize> = (0..l).collect();
        let mut r = embed(&pn, &p_map(l, m), total)
            .add(&embed(&qn, &q_map(l, m, n), total))
            .sub(&embed(&shared_poly, &shared_map, total));
        for i in 0..m {
            for j in 0..n {
                let g = (bp[l + i] * cq[l + j] - y[i][j]) / 4.0;
                if g != 0.0 {
                    let mut e = vec![0u32; total];
                    e[l + i] += 1;
                    e[l + m + j] += 1;
                    r.add_term(Monomial(e), rat_from_f64(2.0 * g)?);
                }
            }
        }
        Ok(r)
    };
    for shift in [0.0, 1e-8, 1e-6] {
        let y = complete(shift)?;
        let r = assemble(&y)?;
        let (_, verdict) = quadratic_rz_certificate(&r)?;
        if verdict != crate::linalg::PsdVerdict::NotPsd {
            return Ok(r.scale(&p0));
        }
    }
    Err(Error::Residual(
        "completed discriminant failed its PSD check".into(),
    ))
}

fn p_map(l: usize, m: usize) -> Vec<usize> {
    (0..l + m).collect()
}

fn q_map(l: usize, m: usize, n: usize) -> Vec<usize> {
    (0..l).chain(l + m..l + m + n).collect()
}

fn embed(p: &Polynomial, map: &[usize], total: usize) -> Polynomial {
    p.remap_vars(map, total)
}

// ---------------------------------------------------------------------------
// One shared variable, degree two: gluing planar representations
// ---------------------------------------------------------------------------

/// Amalgamate quadratics `p(x, y)` and `q(x, z)` (one variable per block)
/// by gluing their explicit 2x2 determinantal representations: conjugate
/// both shared coefficient matrices onto a common diagonal (their spectra
/// must agree within `1e-8`) and expand
/// `det(I + x D + y B + z C)`. Restrictions are certified at `1e-7`.
pub fn amalgamate_deg2_onevar(p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    if p.n_vars() != 2 || q.n_vars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.n_vars().max(q.n_vars()),
        });
    }
    let p0 = p.constant_term();
    let q0 = q.constant_term();
    if p0.is_zero() || q0.is_zero() {
        return Err(Error::ZeroAtOrigin);
    }
    if p.restrict_vars(1)? != q.restrict_vars(1)? {
        return Err(Error::SharedMismatch(
            "shared univariate parts differ".into(),
        ));
    }
    let pn = p.scale(&(Rat::one() / &p0));
    let qn = q.scale(&(Rat::one() / &p0));
    let rep_p = crate::detrep::hv2_quadratic(&pn)?;
    let rep_q = crate::detrep::hv2_quadratic(&qn)?;
    // Diagonalize the shared coefficient matrices.
    let (dp, up) = eig_sym(rep_p.coeffs()[0].re())?;
    let (dq, uq) = eig_sym(rep_q.coeffs()[0].re())?;
    for (a, b) in dp.iter().zip(&dq) {
        if (a - b).abs() > 1e-8 * (1.0 + a.abs().max(b.abs())) {
            return Err(Error::SharedMismatch(format!(
                "shared spectra differ: {dp:?} vs {dq:?}"
            )));
        }
    }
    let conj = |u: &nalgebra::DMatrix<f64>, m: &SymmetricMatrix| {
        SymmetricMatrix::from_dmatrix_symmetrized(&(u.transpose() * m.to_dmatrix() * u))
    };
    let shared = SymmetricMatrix::diagonal(&dp);
    let b = conj(&up, rep_p.coeffs()[1].re());
    let c = conj(&uq, rep_q.coeffs()[1].re());
    let rep = DetRep::from_symmetric(vec![shared, b, c])?;
    let r = detrep_expand(&rep)?.scale(&p0);
    // Certify both restrictions.
    for (target, keep_z) in [(p, false), (q, true)] {
        let restricted = if keep_z {
            // r(x, 0, z): drop y.
            r.eval_var(1, &Rat::zero()).drop_var(1)
        } else {
            r.restrict_vars(2)?
        };
        let worst = restricted
            .sub(target)
            .terms()
            .map(|(_, cfft)| crate::poly::rat_to_f64(cfft).abs())
            .fold(0.0, f64::max);
        if worst > GLUE_TOL {
            return Err(Error::Residual(format!(
                "glued restriction residual {worst:.3e}"
            )));
        }
    }
    Ok(r)
}
