//! Explicit determinantal representations.
//!
//! Small constructive cases where `p = det(I + x_1 A_1 + ... + x_n A_n)`
//! can be written down in closed form:
//!
//! - planar quadratics (the explicit 2x2 symmetric representation, with a
//!   random-rotation fallback when the leading discriminant minor
//!   degenerates),
//! - the bordered circle pencil representing
//!   `x_0^{n-1} (x_0^2 + d_1 x_1^2 + ... + d_n x_n^2)` up to a constant,
//! - the linear-cofactor representation of a quadratic real zero
//!   polynomial: `p ((1 + trunc_1 p)/2)^{n-1}` as a monic symmetric
//!   determinant of size `n+1`,
//! - perfect coefficient families (spans for which the relaxation is exact)
//!   with spanning-rank certificates,
//! - the derived-cone pencil of the determinant of the general symmetric
//!   matrix.
//!
//! Every construction is certified by an expansion residual check against
//! the exact determinant expansion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{quadratic_parts, quadratic_rz_certificate};
use crate::linalg::{eig_sym, SymmetricMatrix};
use crate::moments::{detrep_expand, moment_table, DetRep};
use crate::pencil::{build_pencil, FloatPencil, HomogeneousPencil};
use crate::poly::{rat_to_f64, Monomial, Polynomial, Rat};
use crate::rng::SplitMix64;
use num_traits::{One, Zero};

/// Coefficientwise residual bound for expansion checks.
const EXPANSION_TOL: f64 = 1e-8;

/// Degeneracy threshold for the leading discriminant minor.
const DEGENERATE_R: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Planar quadratics
// ---------------------------------------------------------------------------

/// 2x2 symmetric determinantal representation of a planar quadratic real
/// zero polynomial with `p(0) = 1` (inputs are normalized by `p(0)`).
///
/// Writing `p = x^T A x + b^T x + 1` with discriminant `b b^T - 4A >= 0`,
/// the representation is explicit in the minors `r = b_1^2 - 4 a_11` and
/// `s = det(b b^T - 4A)`. When `r` degenerates the polynomial is rotated by
/// a random angle until the minor becomes generic and the coefficient
/// matrices are rotated back; the perfect-square case `b b^T = 4A` gets the
/// scalar representation `A_i = (b_i/2) I_2`.
pub fn hv2_quadratic(p: &Polynomial) -> Result<DetRep> {
    if p.n_vars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.n_vars(),
        });
    }
    let (_, verdict) = quadratic_rz_certificate(p)?;
    if verdict == crate::linalg::PsdVerdict::NotPsd {
        return Err(Error::NotPsd);
    }
    let p0 = p.constant_term();
    let normalized = p.scale(&(Rat::one() / p0));
    let rep = hv2_inner(&normalized, 0)?;
    verify_expansion(&rep, &normalized)?;
    Ok(rep)
}

fn hv2_inner(p: &Polynomial, depth: u32) -> Result<DetRep> {
    let (a, b) = quadratic_parts(p)?;
    // Certificate matrix entries.
    let c11 = b[0] * b[0] - 4.0 * a.get(0, 0);
    let c12 = b[0] * b[1] - 4.0 * a.get(0, 1);
    let c22 = b[1] * b[1] - 4.0 * a.get(1, 1);
    let cert_norm = (c11 * c11 + 2.0 * c12 * c12 + c22 * c22).sqrt();
    if cert_norm <= DEGENERATE_R {
        // b b^T = 4A: p = (1 + b^T x / 2)^2.
        let a1 = SymmetricMatrix::diagonal(&[b[0] / 2.0, b[0] / 2.0]);
        let a2 = SymmetricMatrix::diagonal(&[b[1] / 2.0, b[1] / 2.0]);
        return DetRep::from_symmetric(vec![a1, a2]);
    }
    // The closed formula divides by r, with the cross entry c12 amplified
    // by 1/sqrt(r): safe when r is generic, and safe for any positive r
    // once the certificate is diagonal (c12 = 0).
    let r = c11;
    let generic = r > 1e-4 * (1.0 + cert_norm);
    let diagonalized = depth > 0 && r > 1e-13 * (1.0 + cert_norm);
    if generic || diagonalized {
        let s = (c11 * c22 - c12 * c12).max(0.0);
        let sqrt_r = r.sqrt();
        let sqrt_rs = (r * s).max(0.0).sqrt();
        let a1 = SymmetricMatrix::diagonal(&[(b[0] - sqrt_r) / 2.0, (b[0] + sqrt_r) / 2.0]);
        let d11 = b[0] * b[0] * b[1] - b[0] * b[1] * sqrt_r - 4.0 * a.get(0, 0) * b[1]
            + 4.0 * a.get(0, 1) * sqrt_r;
        let d22 = b[0] * b[0] * b[1] + b[0] * b[1] * sqrt_r - 4.0 * a.get(0, 0) * b[1]
            - 4.0 * a.get(0, 1) * sqrt_r;
        // The sign of sqrt(rs) follows the certificate off-diagonal.
        let off = if c12 >= 0.0 { sqrt_rs } else { -sqrt_rs };
        let a2 = SymmetricMatrix::from_rows(&[
            vec![d11 / (2.0 * r), off / (2.0 * r)],
            vec![off / (2.0 * r), d22 / (2.0 * r)],
        ])?;
        return DetRep::from_symmetric(vec![a1, a2]);
    }
    if depth >= 2 {
        return Err(Error::Numerical(
            "rotation fallback failed to reach a generic minor".into(),
        ));
    }
    // Degenerate leading minor: rotate into the eigenbasis of the
    // certificate (descending eigenvalues), where the leading minor is the
    // largest eigenvalue and the cross entry vanishes, represent there and
    // rotate the coefficients back.
    let cert = SymmetricMatrix::from_rows(&[vec![c11, c12], vec![c12, c22]])?;
    let (_, vectors) = eig_sym(&cert)?;
    // Ascending order from the eigensolver; flip to put the largest first.
    let v = [
        [vectors[(0, 1)], vectors[(0, 0)]],
        [vectors[(1, 1)], vectors[(1, 0)]],
    ];
    let rotated = p.rotate_f64(&[v[0].to_vec(), v[1].to_vec()])?;
    let inner = hv2_inner(&rotated, depth + 1)?;
    let b1 = inner.coeffs()[0].re().clone();
    let b2 = inner.coeffs()[1].re().clone();
    // p(x) = q(V^T x) with q = p(Vx), so A_i = sum_j V_ij B_j.
    let a1 = b1.scale(v[0][0]).add(&b2.scale(v[0][1]));
    let a2 = b1.scale(v[1][0]).add(&b2.scale(v[1][1]));
    DetRep::from_symmetric(vec![a1, a2])
}

/// Compare the exact expansion of `rep` with `target`, coefficientwise.
pub fn verify_expansion(rep: &DetRep, target: &Polynomial) -> Result<()> {
    let expanded = detrep_expand(rep)?;
    let diff = expanded.sub(target);
    let worst = diff
        .terms()
        .map(|(_, c)| rat_to_f64(c).abs())
        .fold(0.0, f64::max);
    if worst > EXPANSION_TOL {
        return Err(Error::Residual(format!(
            "expansion residual {worst:.3e} exceeds {EXPANSION_TOL:.0e}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// The circle pencil
// ---------------------------------------------------------------------------

/// The bordered homogeneous pencil
///
/// ```text
/// [ x0      -d1 x1   ...  -dn xn ]
/// [ -d1 x1  -d1 x0               ]
/// [ ...              ...         ]
/// [ -dn xn                -dn x0 ]
/// ```
///
/// whose determinant is `x0^{n-1} (x0^2 + d1 x1^2 + ... + dn xn^2)` times
/// the constant `det M(1, 0) = prod (-d_i)`. With `d_i = -1` this encodes
/// the unit ball.
pub fn circle_pencil(d: &[Rat]) -> Result<HomogeneousPencil> {
    let n = d.len();
    let size = n + 1;
    let mut blocks = Vec::with_capacity(n + 1);
    // Coefficient of x0: diag(1, -d_1, ..., -d_n).
    let mut b0 = crate::linalg::RatMatrix::zeros(size);
    b0.set(0, 0, Rat::one());
    for i in 0..n {
        b0.set(i + 1, i + 1, -d[i].clone());
    }
    blocks.push(b0);
    for i in 0..n {
        let mut bi = crate::linalg::RatMatrix::zeros(size);
        bi.set_sym(0, i + 1, -d[i].clone());
        blocks.push(bi);
    }
    HomogeneousPencil::new(blocks)
}

/// Exact determinant of a homogeneous pencil as a polynomial in its
/// variables.
pub fn pencil_determinant(pencil: &HomogeneousPencil) -> Result<Polynomial> {
    let size = pencil.size();
    let rows: Vec<Vec<Polynomial>> = (0..size)
        .map(|i| (0..size).map(|j| pencil.entry_poly(i, j)).collect())
        .collect();
    crate::polymat::det(&rows)
}

// ---------------------------------------------------------------------------
// Linear cofactor representation of quadratics
// ---------------------------------------------------------------------------

/// Symmetric monic representation of `p ((1 + trunc_1 p)/2)^{n-1}` of size
/// `n+1` for a quadratic real zero polynomial with `p(0) = 1`.
///
/// The construction follows the bordered-pencil route: split off the rank
/// of `A - b b^T/4`, diagonalize it orthogonally, assemble the circle-style
/// bordered matrix, substitute `(1 + b^T x/2, U^T x)` and congruence-scale
/// the constant block to the identity. The perfect-square case `m = 0`
/// uses `A_i = (b_i / 2) I_{n+1}` directly.
pub fn lincofactor_rep(p: &Polynomial) -> Result<DetRep> {
    let n = p.n_vars();
    let (_, verdict) = quadratic_rz_certificate(p)?;
    if verdict == crate::linalg::PsdVerdict::NotPsd {
        return Err(Error::NotPsd);
    }
    let p0 = p.constant_term();
    if p0.is_zero() {
        return Err(Error::ZeroAtOrigin);
    }
    let normalized = p.scale(&(Rat::one() / p0));
    let (a, b) = quadratic_parts(&normalized)?;
    // E = A - b b^T / 4 is negative semidefinite for real zero quadratics.
    let mut e = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            e.set_sym(i, j, a.get(i, j) - b[i] * b[j] / 4.0);
        }
    }
    let (values, vectors) = eig_sym(&e)?;
    let scale = 1.0 + e.frobenius_norm();
    let negatives: Vec<usize> = (0..n).filter(|&i| values[i] < -1e-9 * scale).collect();
    if values.iter().any(|&v| v > 1e-7 * scale) {
        return Err(Error::NotPsd);
    }
    let m = negatives.len();
    let size = n + 1;
    let rep = if m == 0 {
        // p = (1 + b^T x / 2)^2.
        let coeffs: Vec<SymmetricMatrix> = (0..n)
            .map(|i| SymmetricMatrix::identity(size).scale(b[i] / 2.0))
            .collect();
        DetRep::from_symmetric(coeffs)?
    } else {
        // Bordered matrix in (x0, y_1..y_m); N = M(1 + b^T x/2, U^T x).
        let d_neg: Vec<f64> = negatives.iter().map(|&i| values[i]).collect();
        let mut b0 = vec![1.0; size];
        for (slot, &dv) in d_neg.iter().enumerate() {
            b0[slot + 1] = -dv;
        }
        let d0 = SymmetricMatrix::diagonal(&b0);
        let mut blocks = Vec::with_capacity(n + 1);
        blocks.push(d0.clone());
        for k in 0..n {
            let mut bk = d0.scale(b[k] / 2.0);
            for (slot, &col) in negatives.iter().enumerate() {
                // Border entries -d_slot y_slot with y_slot = (U^T x)_col
                // = sum_k U[k][col] x_k.
                let w = vectors[(k, col)];
                let add = -d_neg[slot] * w;
                bk.set_sym(0, slot + 1, bk.get(0, slot + 1) + add);
            }
            blocks.push(bk);
        }
        // Congruence by diag(B_0)^{-1/2} makes the constant block I.
        let dscale: Vec<f64> = b0.iter().map(|v| 1.0 / v.sqrt()).collect();
        let mut coeffs = Vec::with_capacity(n);
        for bk in blocks.iter().skip(1) {
            let mut ak = SymmetricMatrix::zeros(size);
            for i in 0..size {
                for j in i..size {
                    ak.set_sym(i, j, bk.get(i, j) * dscale[i] * dscale[j]);
                }
            }
            coeffs.push(ak);
        }
        DetRep::from_symmetric(coeffs)?
    };
    // Certify: expansion equals p ((1 + trunc_1 p)/2)^{n-1}.
    let target = lincofactor_target(&normalized)?;
    verify_expansion(&rep, &target)?;
    Ok(rep)
}

/// The certified product `p ((1 + trunc_1 p)/2)^{n-1}`, exactly.
pub fn lincofactor_target(p: &Polynomial) -> Result<Polynomial> {
    let n = p.n_vars();
    let mut ell = p.truncate(1);
    ell.add_term(Monomial::one(n), Rat::one());
    let ell = ell.scale(&crate::poly::rat_frac(1, 2));
    Ok(p.mul(&ell.pow(n as u32 - 1)))
}

/// Both sides of the quadratic determinant identity
/// `det(M_p) = det(M_p(0)) ((1 + trunc_1 p)/2)^{n-1} p`, exactly.
pub fn det_mp_identity(p: &Polynomial) -> Result<(Polynomial, Polynomial)> {
    if let Some(d) = p.degree() {
        if d > 2 {
            return Err(Error::DegreeBound { got: d, bound: 2 });
        }
    }
    let n = p.n_vars();
    let table = moment_table(p, p.degree().unwrap_or(0), 3)?;
    let pencil = build_pencil(&table)?;
    // det(M_p) as an exact polynomial.
    let rows: Vec<Vec<Polynomial>> = (0..pencil.size())
        .map(|i| {
            (0..pencil.size())
                .map(|j| {
                    let mut entry =
                        Polynomial::constant(n, pencil.coeffs()[0].get(i, j).clone());
                    for k in 0..n {
                        entry.add_term(
                            Monomial::var(n, k),
                            pencil.coeffs()[k + 1].get(i, j).clone(),
                        );
                    }
                    entry
                })
                .collect()
        })
        .collect();
    let lhs = crate::polymat::det(&rows)?;
    // det(M_p(0)) as an exact constant.
    let const_rows: Vec<Vec<Polynomial>> = (0..pencil.size())
        .map(|i| {
            (0..pencil.size())
                .map(|j| Polynomial::constant(n, pencil.coeffs()[0].get(i, j).clone()))
                .collect()
        })
        .collect();
    let det0 = crate::polymat::det(&const_rows)?.constant_term();
    let rhs = lincofactor_target(p)?.scale(&det0);
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Perfect families
// ---------------------------------------------------------------------------

/// The constructively certified perfect families of Hermitian matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerfectKind {
    /// Real multiples of the identity.
    ScalarIdentity,
    /// Real diagonal matrices.
    Diagonal,
    /// All real symmetric matrices.
    FullSymmetric,
    /// The span of `I, A, A^2, ..., A^{d-1}` for a symmetric `A`.
    PowersOfA,
}

/// Generators of a perfect span together with a rank certificate of their
/// vectorizations.
#[derive(Debug, Clone)]
pub struct PerfectFamily {
    pub kind: PerfectKind,
    pub size: usize,
    pub generators: Vec<SymmetricMatrix>,
    /// Rank of the span (equals `generators.len()` unless powers of `A`
    /// collapse through repeated eigenvalues).
    pub rank: usize,
}

/// Build one of the certified perfect families. `PowersOfA` requires the
/// seed matrix; a deficient rank (repeated eigenvalues of `A`) is allowed
/// and reported through the `rank` field.
pub fn perfect_family(
    kind: PerfectKind,
    size: usize,
    a: Option<&SymmetricMatrix>,
) -> Result<PerfectFamily> {
    let generators: Vec<SymmetricMatrix> = match kind {
        PerfectKind::ScalarIdentity => vec![SymmetricMatrix::identity(size)],
        PerfectKind::Diagonal => (0..size)
            .map(|i| {
                let mut m = SymmetricMatrix::zeros(size);
                m.set_sym(i, i, 1.0);
                m
            })
            .collect(),
        PerfectKind::FullSymmetric => {
            let mut gens = Vec::with_capacity(size * (size + 1) / 2);
            for i in 0..size {
                for j in i..size {
                    let mut m = SymmetricMatrix::zeros(size);
                    m.set_sym(i, j, 1.0);
                    gens.push(m);
                }
            }
            gens
        }
        PerfectKind::PowersOfA => {
            let a = a
                .ok_or_else(|| Error::Numerical("powers family needs a seed matrix".into()))?;
            if a.size() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    got: a.size(),
                });
            }
            let mut gens = vec![SymmetricMatrix::identity(size)];
            let ad = a.to_dmatrix();
            let mut power = ad.clone();
            for _ in 1..size {
                gens.push(SymmetricMatrix::from_dmatrix_symmetrized(&power));
                power = &power * &ad;
            }
            gens
        }
    };
    let rank = span_rank(&generators);
    Ok(PerfectFamily {
        kind,
        size,
        generators,
        rank,
    })
}

/// Rank of the vectorized generators (upper triangles as long vectors).
fn span_rank(gens: &[SymmetricMatrix]) -> usize {
    if gens.is_empty() {
        return 0;
    }
    let d = gens[0].size();
    let cols = d * (d + 1) / 2;
    let mat = nalgebra::DMatrix::from_fn(gens.len(), cols, |g, c| {
        let (i, j) = unrank_upper(c, d);
        gens[g].get(i, j)
    });
    let scale = 1.0 + mat.norm();
    mat.rank(1e-10 * scale)
}

fn unrank_upper(mut c: usize, d: usize) -> (usize, usize) {
    for i in 0..d {
        let row_len = d - i;
        if c < row_len {
            return (i, i + c);
        }
        c -= row_len;
    }
    unreachable!("index within the upper triangle")
}

/// Evidence-only search for a falsifier of perfectness of a span: a matrix
/// `A` in the span with `tr(M^2 A) >= 0` for all sampled `M` in the span,
/// yet `A` not PSD. Returns such an `A` when found. Perfectness itself is
/// never decided algorithmically here.
pub fn perfectness_falsifier(
    generators: &[SymmetricMatrix],
    samples: u32,
    seed: u64,
) -> Result<Option<SymmetricMatrix>> {
    if generators.is_empty() {
        return Ok(None);
    }
    let mut rng = SplitMix64::new(seed);
    let combo = |rng: &mut SplitMix64, gens: &[SymmetricMatrix]| {
        let mut m = SymmetricMatrix::zeros(gens[0].size());
        for g in gens {
            m = m.add(&g.scale(rng.range_f64(-1.0, 1.0)));
        }
        m
    };
    let probes: Vec<SymmetricMatrix> =
        (0..samples).map(|_| combo(&mut rng, generators)).collect();
    for _ in 0..samples {
        let candidate = combo(&mut rng, generators);
        if crate::linalg::is_psd(&candidate) != crate::linalg::PsdVerdict::NotPsd {
            continue;
        }
        let dm = candidate.to_dmatrix();
        let all_nonneg = probes.iter().all(|m| {
            let md = m.to_dmatrix();
            (&md * &md * &dm).trace() >= -1e-10
        });
        if all_nonneg {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Exactness reports
// ---------------------------------------------------------------------------

/// Per-ray deviation report for a representation whose coefficient span is
/// expected to make the relaxation exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub rays: u32,
    /// Largest `|gauge_C - gauge_S|` over the sampled rays (infinite
    /// gauges must agree in kind and then count as zero deviation).
    pub max_deviation: f64,
    pub rows: Vec<crate::geometry::SweepRow>,
}

/// Sample ray gauges of `C(p)` versus `S_d(p)` for the polynomial of a
/// determinantal representation; exactness (zero deviation) is expected
/// when the coefficients plus the identity span a perfect family.
pub fn exactness_check_detrep(rep: &DetRep, rays: u32, seed: u64) -> Result<ExactnessReport> {
    let p = detrep_expand(rep)?;
    let table = moment_table(&p, rep.size() as u32, 3)?;
    let pencil = build_pencil(&table)?.to_float();
    let rows = crate::geometry::sweep(&p, &pencil, rays, seed)?;
    let mut max_dev = 0.0f64;
    for row in &rows {
        match (row.gauge_c, row.gauge_s) {
            (Some(c), Some(s)) => max_dev = max_dev.max((c - s).abs()),
            (None, None) => {}
            _ => max_dev = f64::INFINITY,
        }
    }
    Ok(ExactnessReport {
        rays,
        max_deviation: max_dev,
        rows,
    })
}

// ---------------------------------------------------------------------------
// The derived cone of the general symmetric determinant
// ---------------------------------------------------------------------------

/// The conic pencil of `det X` (general symmetric `d x d` matrix) in the
/// direction of the identity, with entries `d sqrt(d) tr(B_i X B_j)`, and
/// its first-row/column deletion whose feasibility describes the first
/// derivative relaxation of the PSD cone.
#[derive(Debug, Clone)]
pub struct SaundersonPencil {
    /// Matrix dimension `d`; the pencil lives in `n = d(d+1)/2` variables.
    pub dim: usize,
    /// Full conic pencil of size `n` over `n` variables.
    pub full: FloatPencil,
    /// The pencil with the first row and column deleted (size `n-1`).
    pub reduced: FloatPencil,
    /// The matrices `B_1, ..., B_n` (the first is `I/sqrt(d)`, the rest are
    /// an orthonormal basis of the trace-zero symmetric matrices).
    pub basis: Vec<SymmetricMatrix>,
}

/// Index of the upper-triangle slot `(i, j)`, `i <= j`, in the fixed
/// row-major order used for the long-vector identification.
pub fn vec_index(i: usize, j: usize, d: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    let mut idx = 0;
    for r in 0..i {
        idx += d - r;
    }
    idx + (j - i)
}

/// Symmetric matrix from the long vector of its upper triangle.
pub fn mat_from_vec(v: &[f64], d: usize) -> SymmetricMatrix {
    let mut m = SymmetricMatrix::zeros(d);
    for i in 0..d {
        for j in i..d {
            m.set_sym(i, j, v[vec_index(i, j, d)]);
        }
    }
    m
}

/// Long vector of the upper triangle of a symmetric matrix.
pub fn vec_from_mat(m: &SymmetricMatrix) -> Vec<f64> {
    let d = m.size();
    let mut v = vec![0.0; d * (d + 1) / 2];
    for i in 0..d {
        for j in i..d {
            v[vec_index(i, j, d)] = m.get(i, j);
        }
    }
    v
}

/// Build the derived-cone pencil for dimension `d >= 1`.
pub fn saunderson_pencil(d: usize) -> Result<SaundersonPencil> {
    if d == 0 {
        return Err(Error::Capacity("dimension must be at least 1".into()));
    }
    let n = d * (d + 1) / 2;
    // Householder U with U vec(I) = sqrt(d) u_1.
    let mut e = vec![0.0; n];
    for i in 0..d {
        e[vec_index(i, i, d)] = 1.0;
    }
    let norm = (d as f64).sqrt();
    let mut v = e.clone();
    v[0] -= norm;
    let vnorm2: f64 = v.iter().map(|x| x * x).sum();
    let u = |i: usize, j: usize| -> f64 {
        let id = f64::from(i == j);
        if vnorm2 < 1e-30 {
            id
        } else {
            id - 2.0 * v[i] * v[j] / vnorm2
        }
    };
    // B_i = [U^T u_i]: the i-th row of U read back as a symmetric matrix.
    let basis: Vec<SymmetricMatrix> = (0..n)
        .map(|i| {
            let row: Vec<f64> = (0..n).map(|j| u(i, j)).collect();
            mat_from_vec(&row, d)
        })
        .collect();
    let factor = (d as f64) * (d as f64).sqrt();
    // Block of x_k: entries d sqrt(d) tr(B_i E_k B_j) with E_k the unit
    // symmetric matrix of slot k.
    let mut blocks = Vec::with_capacity(n);
    for k in 0..n {
        let mut ek_vec = vec![0.0; n];
        ek_vec[k] = 1.0;
        let ek = mat_from_vec(&ek_vec, d).to_dmatrix();
        let pre: Vec<nalgebra::DMatrix<f64>> =
            basis.iter().map(|b| b.to_dmatrix() * &ek).collect();
        let mut block = SymmetricMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let t = (&pre[i] * basis[j].to_dmatrix()).trace();
                block.set_sym(i, j, factor * t);
            }
        }
        blocks.push(block);
    }
    let reduced_blocks: Vec<SymmetricMatrix> = blocks
        .iter()
        .map(|b| {
            let mut r = SymmetricMatrix::zeros(n - 1);
            for i in 1..n {
                for j in i..n {
                    r.set_sym(i - 1, j - 1, b.get(i, j));
                }
            }
            r
        })
        .collect();
    Ok(SaundersonPencil {
        dim: d,
        full: FloatPencil::new_homogeneous(blocks),
        reduced: FloatPencil::new_homogeneous(reduced_blocks),
        basis,
    })
}

/// Reference membership test for the first derivative relaxation of the
/// PSD cone: trace nonnegative and, for `d = 3`, the second elementary
/// symmetric polynomial of the eigenvalues nonnegative as well.
pub fn derived_cone_member_reference(x: &SymmetricMatrix) -> Result<bool> {
    let (ev, _) = eig_sym(x)?;
    let scale = 1.0 + ev.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let tol = 1e-9 * scale;
    let trace: f64 = ev.iter().sum();
    match x.size() {
        1 => Ok(true),
        2 => Ok(trace >= -tol),
        3 => {
            let e2 = ev[0] * ev[1] + ev[0] * ev[2] + ev[1] * ev[2];
            Ok(trace >= -tol && e2 >= -tol * scale)
        }
        d => Err(Error::Capacity(format!(
            "derived-cone reference only implemented for d <= 3, got {d}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{is_psd, PsdVerdict};
    use crate::poly::rat_i64;

    fn poly(s: &str) -> Polynomial {
        Polynomial::parse(s).unwrap()
    }

    #[test]
    fn hv2_unit_disk() {
        // r = 4, s = 16: A_1 = diag(-1, 1), A_2 = [[0,1],[1,0]].
        let rep = hv2_quadratic(&poly("1 - x1^2 - x2^2")).unwrap();
        let a1 = rep.coeffs()[0].re();
        let a2 = rep.coeffs()[1].re();
        assert!((a1.get(0, 0) + 1.0).abs() < 1e-12);
        assert!((a1.get(1, 1) - 1.0).abs() < 1e-12);
        assert!(a1.get(0, 1).abs() < 1e-12);
        assert!((a2.get(0, 1) - 1.0).abs() < 1e-12);
        assert!(a2.get(0, 0).abs() < 1e-12);
        assert_eq!(detrep_expand(&rep).unwrap(), poly("1 - x1^2 - x2^2"));
    }

    #[test]
    fn hv2_product_of_linear_forms() {
        // (1 + x1)(1 + x2): certified by the expansion residual.
        let p = Polynomial::parse_with_vars("1 + x1", 2)
            .unwrap()
            .mul(&poly("1 + x2"));
        let rep = hv2_quadratic(&p).unwrap();
        verify_expansion(&rep, &p).unwrap();
    }

    #[test]
    fn hv2_degenerate_cases() {
        // The constant 1 gets the zero representation.
        let rep = hv2_quadratic(&Polynomial::parse_with_vars("1", 2).unwrap()).unwrap();
        assert!(rep.coeffs().iter().all(|c| c.re().frobenius_norm() == 0.0));
        // Perfect square (1 + x1/2)^2.
        let p = Polynomial::parse_with_vars("1 + x1 + 1/4*x1^2", 2).unwrap();
        let rep = hv2_quadratic(&p).unwrap();
        verify_expansion(&rep, &p).unwrap();
        // Degenerate leading minor: p = 1 - x2^2 has r = 0 and needs the
        // rotation fallback.
        let p = Polynomial::parse_with_vars("1 - x2^2", 2).unwrap();
        let rep = hv2_quadratic(&p).unwrap();
        verify_expansion(&rep, &p).unwrap();
        // Non real zero input is rejected.
        assert!(matches!(
            hv2_quadratic(&Polynomial::parse_with_vars("1 + x1^2", 2).unwrap()),
            Err(Error::NotPsd)
        ));
    }

    #[test]
    fn hv2_representation_is_real_zero() {
        // Expansions of constructed representations pass the probe.
        let mut rng = SplitMix64::new(91);
        for k in 0..30 {
            let p = crate::sampling::random_rz_quadratic(&mut rng, 2);
            let rep = hv2_quadratic(&p).unwrap();
            let q = detrep_expand(&rep).unwrap();
            assert!(crate::geometry::real_zero_probe(&q, 16, 1e-7, 1000 + k)
                .unwrap()
                .passed);
        }
    }

    #[test]
    fn circle_pencil_determinant_identity() {
        // det M = x0^{n-1} (x0^2 + sum d_i x_i^2) det M(1,0) for n <= 4.
        let mut rng = SplitMix64::new(92);
        for n in 1..=4usize {
            for _ in 0..10 {
                let d: Vec<Rat> = (0..n).map(|_| rng.small_rat(-3, 3)).collect();
                let pencil = circle_pencil(&d).unwrap();
                let det = pencil_determinant(&pencil).unwrap();
                // Right hand side, assembled exactly.
                let vars = n + 1;
                let mut circle = Polynomial::zero(vars);
                let mut e0 = vec![0u32; vars];
                e0[0] = 2;
                circle.add_term(Monomial(e0), Rat::one());
                for i in 0..n {
                    let mut e = vec![0u32; vars];
                    e[i + 1] = 2;
                    circle.add_term(Monomial(e), d[i].clone());
                }
                let mut x0pow = vec![0u32; vars];
                x0pow[0] = (n - 1) as u32;
                let lead = Polynomial::from_terms(vars, [(Monomial(x0pow), Rat::one())]);
                let mut det0 = Rat::one();
                for di in &d {
                    det0 *= -di.clone();
                }
                let rhs = lead.mul(&circle).scale(&det0);
                assert_eq!(det, rhs, "n = {n}, d = {d:?}");
            }
        }
    }

    #[test]
    fn circle_pencil_unit_circle() {
        // d = (-1, -1): dehomogenizing det M / det M(1,0) at x0 = 1 gives
        // the unit disk.
        let pencil = circle_pencil(&[rat_i64(-1), rat_i64(-1)]).unwrap();
        let det = pencil_determinant(&pencil).unwrap();
        let at_one = det.eval_var(0, &Rat::one()).drop_var(0);
        assert_eq!(at_one, poly("1 - x1^2 - x2^2"));
        // n = 1, d = (-1): [[x0, x1], [x1, x0]] with determinant
        // x0^2 - x1^2 (variables are x1 = x0, x2 = x1 in text form).
        let pencil = circle_pencil(&[rat_i64(-1)]).unwrap();
        let det = pencil_determinant(&pencil).unwrap();
        assert_eq!(det, poly("x1^2 - x2^2"));
        // A zero scale degenerates the determinant to zero.
        let pencil = circle_pencil(&[rat_i64(0), rat_i64(2)]).unwrap();
        let det = pencil_determinant(&pencil).unwrap();
        assert!(det.is_zero());
    }

    #[test]
    fn lincofactor_unit_disk() {
        let p = poly("1 - x1^2 - x2^2");
        let rep = lincofactor_rep(&p).unwrap();
        assert_eq!(rep.size(), 3);
        let expanded = detrep_expand(&rep).unwrap();
        let target = lincofactor_target(&p).unwrap();
        let worst = expanded
            .sub(&target)
            .terms()
            .map(|(_, c)| rat_to_f64(c).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-8);
    }

    #[test]
    fn lincofactor_perfect_square() {
        // p = (1 + x1/2)^2 in one variable: cofactor exponent 0, diagonal
        // representation with entries b_1/2.
        let p = poly("1 + x1 + 1/4*x1^2");
        let rep = lincofactor_rep(&p).unwrap();
        assert_eq!(rep.size(), 2);
        let a1 = rep.coeffs()[0].re();
        assert!((a1.get(0, 0) - 0.5).abs() < 1e-12);
        assert!((a1.get(1, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lincofactor_univariate() {
        // n = 1 quadratic: cofactor exponent 0, a 2x2 representation of p.
        let p = poly("1 - x1^2");
        let rep = lincofactor_rep(&p).unwrap();
        assert_eq!(rep.size(), 2);
        verify_expansion(&rep, &p).unwrap();
    }

    #[test]
    fn lincofactor_random_quadratics() {
        let mut rng = SplitMix64::new(93);
        for _ in 0..40 {
            let n = rng.range_i64(1, 5) as usize;
            let p = crate::sampling::random_rz_quadratic(&mut rng, n);
            let rep = lincofactor_rep(&p).unwrap();
            assert_eq!(rep.size(), n + 1);
            let expanded = detrep_expand(&rep).unwrap();
            let target = lincofactor_target(&p).unwrap();
            let worst = expanded
                .sub(&target)
                .terms()
                .map(|(_, c)| rat_to_f64(c).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-8, "residual {worst:.3e} for p = {p}");
        }
    }

    #[test]
    fn det_mp_identity_small_cases() {
        let mut rng = SplitMix64::new(94);
        for _ in 0..25 {
            let n = rng.range_i64(1, 4) as usize;
            let p = crate::sampling::random_rz_quadratic(&mut rng, n);
            let (lhs, rhs) = det_mp_identity(&p).unwrap();
            assert_eq!(lhs, rhs, "p = {p}");
        }
    }

    #[test]
    fn perfect_families() {
        let f = perfect_family(PerfectKind::Diagonal, 3, None).unwrap();
        assert_eq!(f.generators.len(), 3);
        assert_eq!(f.rank, 3);
        let f = perfect_family(PerfectKind::FullSymmetric, 2, None).unwrap();
        assert_eq!(f.generators.len(), 3);
        assert_eq!(f.rank, 3);
        let f = perfect_family(PerfectKind::ScalarIdentity, 4, None).unwrap();
        assert_eq!(f.rank, 1);
        // Powers of diag(1,2,3): Vandermonde rank 3.
        let a = SymmetricMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let f = perfect_family(PerfectKind::PowersOfA, 3, Some(&a)).unwrap();
        assert_eq!(f.rank, 3);
        // Repeated eigenvalues collapse the span; the rank is reported.
        let a = SymmetricMatrix::diagonal(&[2.0, 2.0, 3.0]);
        let f = perfect_family(PerfectKind::PowersOfA, 3, Some(&a)).unwrap();
        assert_eq!(f.rank, 2);
    }

    #[test]
    fn exactness_diagonal_representation() {
        // Diagonal coefficients: the LP case, gauges agree.
        let a1 = SymmetricMatrix::diagonal(&[1.0, -0.5]);
        let a2 = SymmetricMatrix::diagonal(&[0.25, 1.0]);
        let rep = DetRep::from_symmetric(vec![a1, a2]).unwrap();
        let report = exactness_check_detrep(&rep, 32, 95).unwrap();
        assert!(
            report.max_deviation <= 1e-6,
            "deviation {:.3e}",
            report.max_deviation
        );
    }

    #[test]
    fn exactness_full_symmetric_span() {
        // d = 2, n = 3: A_i spanning the full symmetric space with the
        // identity.
        let a1 = SymmetricMatrix::diagonal(&[1.0, -1.0]);
        let a2 = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let a3 = SymmetricMatrix::diagonal(&[0.5, 0.5]);
        let rep = DetRep::from_symmetric(vec![a1, a2, a3]).unwrap();
        let report = exactness_check_detrep(&rep, 32, 96).unwrap();
        assert!(
            report.max_deviation <= 1e-6,
            "deviation {:.3e}",
            report.max_deviation
        );
    }

    #[test]
    fn containment_holds_even_without_perfect_span() {
        // A deficient span still satisfies containment (gauge_C <=
        // gauge_S); the deviation may be positive.
        let a1 = SymmetricMatrix::from_rows(&[
            vec![0.4, 0.3, 0.0],
            vec![0.3, -0.2, 0.1],
            vec![0.0, 0.1, 0.7],
        ])
        .unwrap();
        let a2 = SymmetricMatrix::from_rows(&[
            vec![-0.3, 0.2, 0.1],
            vec![0.2, 0.5, 0.0],
            vec![0.1, 0.0, -0.6],
        ])
        .unwrap();
        let rep = DetRep::from_symmetric(vec![a1, a2]).unwrap();
        let report = exactness_check_detrep(&rep, 32, 97).unwrap();
        for row in &report.rows {
            if let (Some(c), Some(s)) = (row.gauge_c, row.gauge_s) {
                assert!(c <= s + 1e-7);
            }
        }
    }

    #[test]
    fn saunderson_basis_properties() {
        // B_2..B_n are trace zero and orthonormal as long vectors.
        for d in 1..=3usize {
            let sp = saunderson_pencil(d).unwrap();
            let n = d * (d + 1) / 2;
            assert_eq!(sp.basis.len(), n);
            for (i, b) in sp.basis.iter().enumerate().skip(1) {
                assert!(b.trace().abs() < 1e-12, "trace of B_{i}");
            }
            for i in 0..n {
                for j in i..n {
                    let vi = vec_from_mat(&sp.basis[i]);
                    let vj = vec_from_mat(&sp.basis[j]);
                    let dot: f64 = vi.iter().zip(&vj).map(|(a, b)| a * b).sum();
                    let expect = f64::from(i == j);
                    assert!((dot - expect).abs() < 1e-12, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn saunderson_d1_trivial_cone() {
        // d = 1: the full pencil is [x1] (the PSD cone of 1x1 matrices).
        let sp = saunderson_pencil(1).unwrap();
        let m = sp.full.eval(&[2.0]).unwrap();
        assert!((m.get(0, 0) - 2.0).abs() < 1e-12);
        assert_eq!(is_psd(&sp.full.eval(&[3.0]).unwrap()), PsdVerdict::Psd);
        assert_eq!(is_psd(&sp.full.eval(&[-3.0]).unwrap()), PsdVerdict::NotPsd);
    }

    #[test]
    fn saunderson_d2_matches_trace_condition() {
        let sp = saunderson_pencil(2).unwrap();
        let mut rng = SplitMix64::new(98);
        for _ in 0..200 {
            let mut x = SymmetricMatrix::zeros(2);
            for i in 0..2 {
                for j in i..2 {
                    x.set_sym(i, j, rng.range_f64(-2.0, 2.0));
                }
            }
            let v = vec_from_mat(&x);
            let verdict = is_psd(&sp.reduced.eval(&v).unwrap());
            match verdict {
                PsdVerdict::Psd => assert!(x.trace() >= -1e-8),
                PsdVerdict::NotPsd => assert!(x.trace() < 1e-6),
                PsdVerdict::Marginal => assert!(x.trace().abs() < 1e-4),
            }
        }
    }

    #[test]
    fn saunderson_full_pencil_is_exactly_the_psd_cone() {
        // The full conic pencil describes the PSD cone itself: sampled
        // containment in both directions.
        let sp = saunderson_pencil(2).unwrap();
        let mut rng = SplitMix64::new(99);
        for _ in 0..200 {
            let mut x = SymmetricMatrix::zeros(2);
            for i in 0..2 {
                for j in i..2 {
                    x.set_sym(i, j, rng.range_f64(-2.0, 2.0));
                }
            }
            let v = vec_from_mat(&x);
            let verdict = is_psd(&sp.full.eval(&v).unwrap());
            let (ev, _) = eig_sym(&x).unwrap();
            let lambda_min = ev[0];
            match verdict {
                PsdVerdict::Psd => assert!(lambda_min >= -1e-7),
                PsdVerdict::NotPsd => assert!(lambda_min < 1e-7),
                PsdVerdict::Marginal => assert!(lambda_min.abs() < 1e-3),
            }
        }
    }

    #[test]
    fn saunderson_trace_formula_matches_moment_route() {
        // The trace-formula pencil is the unconjugated form of the conic
        // moment pencil of det X in the identity direction: they agree
        // after the Householder congruence.
        let d = 2usize;
        let sp = saunderson_pencil(d).unwrap();
        let n = d * (d + 1) / 2;
        // det X in the long-vector variables: x1 x3 - x2^2.
        let p = Polynomial::parse("x1*x3 - x2^2").unwrap();
        let mut e = vec![0.0; n];
        for i in 0..d {
            e[vec_index(i, i, d)] = 1.0;
        }
        let via_moments = crate::pencil::homogeneous_pencil(&p, &e).unwrap();
        // The same Householder both constructions use internally.
        let norm = (d as f64).sqrt();
        let mut v = e.clone();
        v[0] -= norm;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let u = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            f64::from(i == j) - 2.0 * v[i] * v[j] / vnorm2
        });
        let mut rng = SplitMix64::new(101);
        for _ in 0..50 {
            let a: Vec<f64> = (0..n).map(|_| rng.range_f64(-2.0, 2.0)).collect();
            let lhs = sp.full.eval(&a).unwrap();
            // U M_{p,e}(a) U^T undoes the conjugation in the moment route.
            let m = via_moments.eval(&a).unwrap().to_dmatrix();
            let rhs = &u * m * u.transpose();
            let diff = (lhs.to_dmatrix() - rhs).norm();
            assert!(
                diff <= 1e-8 * (1.0 + lhs.frobenius_norm()),
                "diff {diff:.3e}"
            );
        }
    }

    #[test]
    fn constructed_reps_obey_trace_agreement() {
        // Moments of the expansion equal normalized Hurwitz traces for
        // representations built by the explicit constructions.
        let mut rng = SplitMix64::new(102);
        for _ in 0..20 {
            let p = crate::sampling::random_rz_quadratic(&mut rng, 2);
            let rep = hv2_quadratic(&p).unwrap();
            let q = detrep_expand(&rep).unwrap();
            let table = crate::moments::moment_table(&q, 2, 3).unwrap();
            for m in crate::poly::monomials_up_to(2, 3) {
                if m.is_one() {
                    continue;
                }
                let series = rat_to_f64(&table.value(&m).unwrap());
                let trace = crate::moments::detrep_moment(&rep, &m).unwrap();
                assert!((series - trace).abs() <= 1e-9, "monomial {m}");
            }
        }
    }

    #[test]
    fn vec_mat_round_trip() {
        let m = SymmetricMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 5.0],
            vec![3.0, 5.0, 6.0],
        ])
        .unwrap();
        assert_eq!(mat_from_vec(&vec_from_mat(&m), 3), m);
        assert_eq!(vec_index(0, 0, 3), 0);
        assert_eq!(vec_index(0, 2, 3), 2);
        assert_eq!(vec_index(1, 1, 3), 3);
        assert_eq!(vec_index(2, 2, 3), 5);
    }

    #[test]
    fn perfectness_falsifier_on_full_space_finds_nothing() {
        let f = perfect_family(PerfectKind::FullSymmetric, 2, None).unwrap();
        let falsifier = perfectness_falsifier(&f.generators, 50, 100).unwrap();
        assert!(falsifier.is_none());
    }
}
