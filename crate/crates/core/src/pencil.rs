//! Relaxation pencils built from pseudo-moment tables.
//!
//! For a moment table of `p` with virtual degree `d`, the associated pencil
//! is the `(n+1) x (n+1)` symmetric linear matrix polynomial
//! `M_{p,d} = A_0 + x_1 A_1 + ... + x_n A_n` whose constant block is the
//! degree-two moment matrix (top left entry `L(1) = d`) and whose `A_i` are
//! the localization matrices of `x_i`. Its PSD locus `S_d(p)` contains the
//! rigidly convex set `C(p)`. Deleting the first row and column gives the
//! infinite-virtual-degree pencil; indexing by all monomials of degree at
//! most `k` gives the LP hierarchy pencil; reading the first row/column only
//! gives the half-space relaxation.
//!
//! Pencils keep exact rational entries; floating point blocks materialize
//! once via [`Pencil::to_float`] for eigenvalue work.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{RatMatrix, SymmetricMatrix};
use crate::moments::{moment_apply, moment_table, MomentTable};
use crate::poly::{monomials_up_to, rat_i64, rat_to_f64, Monomial, Polynomial, Rat};
use num_traits::{One, Zero};

/// Cap on the monomial basis size of hierarchy pencils.
pub const MAX_HIERARCHY_BASIS: usize = 126;

// ---------------------------------------------------------------------------
// Pencil types
// ---------------------------------------------------------------------------

/// Symmetric linear matrix polynomial `A_0 + x_1 A_1 + ... + x_n A_n` with
/// exact rational blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pencil {
    n_vars: usize,
    coeffs: Vec<RatMatrix>,
}

impl Pencil {
    pub fn new(n_vars: usize, coeffs: Vec<RatMatrix>) -> Result<Self> {
        if coeffs.len() != n_vars + 1 {
            return Err(Error::DimensionMismatch {
                expected: n_vars + 1,
                got: coeffs.len(),
            });
        }
        let size = coeffs[0].size();
        for c in &coeffs {
            if c.size() != size || !c.is_symmetric() {
                return Err(Error::Numerical(
                    "pencil blocks must be symmetric and equally sized".into(),
                ));
            }
        }
        Ok(Pencil { n_vars, coeffs })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn size(&self) -> usize {
        self.coeffs[0].size()
    }

    /// Blocks `A_0, ..., A_n`.
    pub fn coeffs(&self) -> &[RatMatrix] {
        &self.coeffs
    }

    pub fn constant_block(&self) -> &RatMatrix {
        &self.coeffs[0]
    }

    /// Exact evaluation `A_0 + sum a_i A_i`.
    pub fn eval_rat(&self, a: &[Rat]) -> Result<RatMatrix> {
        if a.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: a.len(),
            });
        }
        let mut m = self.coeffs[0].clone();
        for (i, ai) in a.iter().enumerate() {
            if !ai.is_zero() {
                m = m.add(&self.coeffs[i + 1].scale(ai));
            }
        }
        Ok(m)
    }

    /// Floating point evaluation form (blocks converted once).
    pub fn to_float(&self) -> FloatPencil {
        FloatPencil {
            affine: true,
            blocks: self.coeffs.iter().map(|c| c.to_f64()).collect(),
        }
    }
}

/// Homogeneous pencil `x_0 A_0 + x_1 A_1 + ... + x_n A_n` (no constant
/// block); the variable count includes `x_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousPencil {
    coeffs: Vec<RatMatrix>,
}

impl HomogeneousPencil {
    pub fn new(coeffs: Vec<RatMatrix>) -> Result<Self> {
        let size = coeffs.first().map_or(0, |c| c.size());
        for c in &coeffs {
            if c.size() != size || !c.is_symmetric() {
                return Err(Error::Numerical(
                    "pencil blocks must be symmetric and equally sized".into(),
                ));
            }
        }
        Ok(HomogeneousPencil { coeffs })
    }

    pub fn n_vars(&self) -> usize {
        self.coeffs.len()
    }

    pub fn size(&self) -> usize {
        self.coeffs.first().map_or(0, |c| c.size())
    }

    pub fn coeffs(&self) -> &[RatMatrix] {
        &self.coeffs
    }

    pub fn eval_rat(&self, a: &[Rat]) -> Result<RatMatrix> {
        if a.len() != self.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                got: a.len(),
            });
        }
        let mut m = RatMatrix::zeros(self.size());
        for (i, ai) in a.iter().enumerate() {
            if !ai.is_zero() {
                m = m.add(&self.coeffs[i].scale(ai));
            }
        }
        Ok(m)
    }

    pub fn to_float(&self) -> FloatPencil {
        FloatPencil {
            affine: false,
            blocks: self.coeffs.iter().map(|c| c.to_f64()).collect(),
        }
    }

    /// Entry `(i, j)` as a linear polynomial in the pencil variables.
    pub fn entry_poly(&self, i: usize, j: usize) -> Polynomial {
        let n = self.coeffs.len();
        Polynomial::from_terms(
            n,
            (0..n).map(|k| (Monomial::var(n, k), self.coeffs[k].get(i, j).clone())),
        )
    }
}

/// Floating point evaluation form of a pencil; `affine` pencils treat block
/// 0 as the constant part, homogeneous ones use all blocks as coordinates.
#[derive(Debug, Clone)]
pub struct FloatPencil {
    affine: bool,
    blocks: Vec<SymmetricMatrix>,
}

impl FloatPencil {
    pub fn new_affine(blocks: Vec<SymmetricMatrix>) -> Self {
        FloatPencil {
            affine: true,
            blocks,
        }
    }

    pub fn new_homogeneous(blocks: Vec<SymmetricMatrix>) -> Self {
        FloatPencil {
            affine: false,
            blocks,
        }
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn n_vars(&self) -> usize {
        if self.affine {
            self.blocks.len() - 1
        } else {
            self.blocks.len()
        }
    }

    pub fn size(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.size())
    }

    pub fn blocks(&self) -> &[SymmetricMatrix] {
        &self.blocks
    }

    pub fn eval(&self, a: &[f64]) -> Result<SymmetricMatrix> {
        if a.len() != self.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars(),
                got: a.len(),
            });
        }
        let mut m = if self.affine {
            self.blocks[0].clone()
        } else {
            SymmetricMatrix::zeros(self.size())
        };
        let offset = usize::from(self.affine);
        for (i, &ai) in a.iter().enumerate() {
            if ai != 0.0 {
                m = m.add(&self.blocks[i + offset].scale(ai));
            }
        }
        Ok(m)
    }
}

// ---------------------------------------------------------------------------
// Constructions from moment tables
// ---------------------------------------------------------------------------

fn require_cutoff(table: &MomentTable, needed: u32) -> Result<()> {
    if table.cutoff() < needed {
        return Err(Error::Capacity(format!(
            "moment cutoff {} below required {}",
            table.cutoff(),
            needed
        )));
    }
    Ok(())
}

/// The pencil `M_{p,d}` of size `n+1` from a moment table with cutoff at
/// least 3.
pub fn build_pencil(table: &MomentTable) -> Result<Pencil> {
    require_cutoff(table, 3)?;
    let n = table.n_vars();
    let basis = monomials_up_to(n, 1); // 1, x_1, ..., x_n
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut block = RatMatrix::zeros(n + 1);
        let factor = if k == 0 {
            Monomial::one(n)
        } else {
            Monomial::var(n, k - 1)
        };
        for i in 0..=n {
            for j in i..=n {
                let m = basis[i].mul(&basis[j]).mul(&factor);
                block.set_sym(i, j, table.value(&m)?);
            }
        }
        coeffs.push(block);
    }
    Pencil::new(n, coeffs)
}

/// The infinite-virtual-degree pencil `M_{p,inf}` of size `n`: `M_{p,d}`
/// with the first row and column deleted (independent of `d`).
pub fn build_pencil_inf(table: &MomentTable) -> Result<Pencil> {
    require_cutoff(table, 3)?;
    let n = table.n_vars();
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut block = RatMatrix::zeros(n);
        let factor = if k == 0 {
            Monomial::one(n)
        } else {
            Monomial::var(n, k - 1)
        };
        for i in 0..n {
            for j in i..n {
                let m = Monomial::var(n, i).mul(&Monomial::var(n, j)).mul(&factor);
                block.set_sym(i, j, table.value(&m)?);
            }
        }
        coeffs.push(block);
    }
    Pencil::new(n, coeffs)
}

/// Both sides of the quadratic form identity
/// `v^T M_{p,d}(a) v = L_{p,d}((v_0 + v_1 x_1 + ... + v_n x_n)^2 (1 + a^T x))`,
/// computed independently and exactly.
pub fn quadratic_form_identity_check(
    table: &MomentTable,
    a: &[Rat],
    v: &[Rat],
) -> Result<(Rat, Rat)> {
    let n = table.n_vars();
    if a.len() != n || v.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len().max(v.len()),
        });
    }
    let pencil = build_pencil(table)?;
    let lhs = pencil.eval_rat(a)?.quad_form(v);
    let mut linear = Polynomial::constant(n, v[0].clone());
    for i in 0..n {
        linear.add_term(Monomial::var(n, i), v[i + 1].clone());
    }
    let mut affine = Polynomial::one(n);
    for i in 0..n {
        affine.add_term(Monomial::var(n, i), a[i].clone());
    }
    let rhs = moment_apply(table, &linear.mul(&linear).mul(&affine))?;
    Ok((lhs, rhs))
}

/// The `d`-th hierarchy pencil `M_p^{(d)}`: rows and columns indexed by the
/// monomials of degree at most `d` in the fixed graded-lex order, entries
/// `L_p(m_i m_j)` resp. `L_p(x_k m_i m_j)`. The virtual degree is `deg p`.
pub fn build_hierarchy_pencil(p: &Polynomial, level: u32) -> Result<Pencil> {
    let n = p.n_vars();
    let deg = p.degree().ok_or(Error::ZeroAtOrigin)?;
    let basis = monomials_up_to(n, level);
    if basis.len() > MAX_HIERARCHY_BASIS {
        return Err(Error::Capacity(format!(
            "hierarchy basis of {} monomials exceeds the cap of {MAX_HIERARCHY_BASIS}",
            basis.len()
        )));
    }
    let table = moment_table(p, deg, 2 * level + 1)?;
    let s = basis.len();
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut block = RatMatrix::zeros(s);
        let factor = if k == 0 {
            Monomial::one(n)
        } else {
            Monomial::var(n, k - 1)
        };
        for i in 0..s {
            for j in i..s {
                let m = basis[i].mul(&basis[j]).mul(&factor);
                block.set_sym(i, j, table.value(&m)?);
            }
        }
        coeffs.push(block);
    }
    Pencil::new(n, coeffs)
}

// ---------------------------------------------------------------------------
// Half-space relaxation
// ---------------------------------------------------------------------------

/// The polyhedral relaxation `P_d(p)`: the inequality
/// `L(1) + L(x_1) b_1 + ... + L(x_n) b_n >= 0`, which is an affine half
/// space unless all linear moments vanish (then it is the full space).
/// Rationals serialize as `p/q` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HalfSpaceJson", into = "HalfSpaceJson")]
pub struct HalfSpace {
    /// Constant coefficient `L(1) = d`.
    pub constant: Rat,
    /// Linear coefficients `L(x_i)`.
    pub linear: Vec<Rat>,
}

#[derive(Serialize, Deserialize)]
struct HalfSpaceJson {
    constant: String,
    linear: Vec<String>,
}

impl From<HalfSpace> for HalfSpaceJson {
    fn from(h: HalfSpace) -> Self {
        HalfSpaceJson {
            constant: h.constant.to_string(),
            linear: h.linear.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl TryFrom<HalfSpaceJson> for HalfSpace {
    type Error = Error;
    fn try_from(j: HalfSpaceJson) -> Result<Self> {
        Ok(HalfSpace {
            constant: crate::poly::parse_rat(&j.constant)?,
            linear: j
                .linear
                .iter()
                .map(|s| crate::poly::parse_rat(s))
                .collect::<Result<_>>()?,
        })
    }
}

impl HalfSpace {
    pub fn is_full_space(&self) -> bool {
        self.linear.iter().all(|c| c.is_zero())
    }

    pub fn contains_rat(&self, b: &[Rat]) -> Result<bool> {
        if b.len() != self.linear.len() {
            return Err(Error::DimensionMismatch {
                expected: self.linear.len(),
                got: b.len(),
            });
        }
        let mut v = self.constant.clone();
        for (c, bi) in self.linear.iter().zip(b) {
            v += c * bi;
        }
        Ok(v >= Rat::zero())
    }

    pub fn contains(&self, b: &[f64]) -> Result<bool> {
        if b.len() != self.linear.len() {
            return Err(Error::DimensionMismatch {
                expected: self.linear.len(),
                got: b.len(),
            });
        }
        let v = rat_to_f64(&self.constant)
            + self
                .linear
                .iter()
                .zip(b)
                .map(|(c, bi)| rat_to_f64(c) * bi)
                .sum::<f64>();
        Ok(v >= -1e-12)
    }
}

/// The half-space relaxation read off the first row of the pencil.
pub fn halfspace(table: &MomentTable) -> Result<HalfSpace> {
    let n = table.n_vars();
    let mut linear = Vec::with_capacity(n);
    for i in 0..n {
        linear.push(table.value(&Monomial::var(n, i))?);
    }
    Ok(HalfSpace {
        constant: rat_i64(table.virtual_degree() as i64),
        linear,
    })
}

// ---------------------------------------------------------------------------
// Homogeneous and conic pencils
// ---------------------------------------------------------------------------

/// `M*_{p,d} = x_0 A_0 + x_1 A_1 + ... + x_n A_n`: the homogenization of the
/// pencil of a moment table, in `n+1` variables.
pub fn homogeneous_star_pencil(table: &MomentTable) -> Result<HomogeneousPencil> {
    let pencil = build_pencil(table)?;
    HomogeneousPencil::new(pencil.coeffs().to_vec())
}

/// The conic pencil `M_{p,e}` of a polynomial hyperbolic in direction `e`:
/// rotate `e` onto the first axis by a Householder reflection, dehomogenize
/// to a real zero polynomial `r`, build `M*_{r, deg p}` and conjugate back.
/// The result does not depend on the choice of the orthogonal matrix.
pub fn homogeneous_pencil(p: &Polynomial, e: &[f64]) -> Result<FloatPencil> {
    let n = p.n_vars();
    if e.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: e.len(),
        });
    }
    let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidAnchor("zero hyperbolicity direction".into()));
    }
    let deg = p.degree().ok_or(Error::ZeroAtOrigin)?;
    if !is_homogeneous(p) {
        return Err(Error::NotHyperbolic("polynomial is not homogeneous".into()));
    }
    let probe = crate::geometry::hyperbolicity_probe(p, e, 32, 1e-7, 0xbead)?;
    if !probe.passed {
        return Err(Error::NotHyperbolic(format!(
            "direction probe failed: {:?}",
            probe.counterexample
        )));
    }
    let u = householder_to_first_axis(e, norm);
    // q = p(U^T x); U is symmetric so U^T = U.
    let q = p.rotate_f64(&u)?;
    // r = q(1, x_2, ..., x_n): dehomogenize in the first variable.
    let r = q.eval_var(0, &Rat::one()).drop_var(0);
    let table = moment_table(&r, deg, 3)?;
    let star = homogeneous_star_pencil(&table)?;
    // M_{p,e}(x) = U^T M*(Ux) U; coefficient of x_j is
    // U^T (sum_k U_{kj} A_k) U.
    let star_blocks: Vec<SymmetricMatrix> = star.coeffs().iter().map(|c| c.to_f64()).collect();
    let mut blocks = Vec::with_capacity(n);
    let ud = nalgebra::DMatrix::from_fn(n, n, |i, j| u[i][j]);
    for j in 0..n {
        let mut combo = SymmetricMatrix::zeros(n);
        for (k, sb) in star_blocks.iter().enumerate() {
            let w = u[k][j];
            if w != 0.0 {
                combo = combo.add(&sb.scale(w));
            }
        }
        let conj = ud.transpose() * combo.to_dmatrix() * &ud;
        blocks.push(SymmetricMatrix::from_dmatrix_symmetrized(&conj));
    }
    Ok(FloatPencil::new_homogeneous(blocks))
}

fn is_homogeneous(p: &Polynomial) -> bool {
    let mut degrees = p.terms().map(|(m, _)| m.degree());
    match degrees.next() {
        None => true,
        Some(d) => degrees.all(|e| e == d),
    }
}

/// Householder (or identity-like) orthogonal matrix with `U e = |e| u_1`.
fn householder_to_first_axis(e: &[f64], norm: f64) -> Vec<Vec<f64>> {
    let n = e.len();
    let mut v: Vec<f64> = e.to_vec();
    v[0] -= norm;
    let vnorm2: f64 = v.iter().map(|x| x * x).sum();
    let mut u = vec![vec![0.0; n]; n];
    if vnorm2 < 1e-30 {
        for (i, row) in u.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        return u;
    }
    for i in 0..n {
        for j in 0..n {
            u[i][j] = f64::from(i == j) - 2.0 * v[i] * v[j] / vnorm2;
        }
    }
    u
}

// ---------------------------------------------------------------------------
// Shifted pencil families
// ---------------------------------------------------------------------------

/// One member of a shifted family: the pencil of `p(x+a)/p(a)` anchored at
/// `a`; membership of `x` means `x - a` lies in the anchored spectrahedron.
#[derive(Debug, Clone)]
pub struct AnchoredPencil {
    pub anchor: Vec<Rat>,
    pub pencil: Pencil,
}

/// Build the family `S_d(p(x+a)) + a` over the given anchors. Every anchor
/// must lie strictly inside the rigidly convex set (gauge along the anchor
/// ray above `1 + 1e-9`, or unbounded); the origin itself is always a valid
/// anchor when `p(0) != 0`.
pub fn shifted_pencil_family(p: &Polynomial, anchors: &[Vec<Rat>]) -> Result<Vec<AnchoredPencil>> {
    let deg = p.degree().ok_or(Error::ZeroAtOrigin)?;
    let mut out = Vec::with_capacity(anchors.len());
    for anchor in anchors {
        if anchor.len() != p.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: p.n_vars(),
                got: anchor.len(),
            });
        }
        let pa = p.eval_rat(anchor)?;
        if pa.is_zero() {
            return Err(Error::InvalidAnchor(
                "anchor lies on the zero set".to_string(),
            ));
        }
        let af: Vec<f64> = anchor.iter().map(rat_to_f64).collect();
        if af.iter().any(|&x| x != 0.0) {
            let gauge = crate::geometry::ray_gauge_c(p, &af)?;
            let strictly_inside = match gauge.gauge {
                None => true,
                Some(g) => g > 1.0 + 1e-9,
            };
            if !strictly_inside {
                return Err(Error::InvalidAnchor(format!(
                    "anchor gauge {:?} not strictly above 1",
                    gauge.gauge
                )));
            }
        }
        let shifted = p.shift(anchor)?.scale(&(Rat::one() / pa));
        let table = moment_table(&shifted, deg, 3)?;
        out.push(AnchoredPencil {
            anchor: anchor.clone(),
            pencil: build_pencil(&table)?,
        });
    }
    Ok(out)
}
