//! Membership and gauge oracles.
//!
//! The rigidly convex set of a real zero polynomial is probed along rays:
//! the gauge of a direction is the smallest positive real root of the
//! univariate restriction `t -> p(ta)` (computed from a balanced companion
//! matrix with one Newton polish per root), or unbounded when no positive
//! real root exists. Spectrahedra are probed by bisection on the PSD
//! verdict of the pencil along the ray, which is valid because the section
//! of a convex set containing the origin is an interval.
//!
//! Real-zero and hyperbolicity checking is probabilistic: many random
//! directions, all restricted roots required to be real within tolerance.
//! Verdicts are labeled as evidence, not proof; for quadratics the exact
//! discriminant certificate `b b^T - 4A >= 0` is available.

use nalgebra::{Complex, DMatrix};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_psd, PsdVerdict, SymmetricMatrix};
use crate::pencil::FloatPencil;
use crate::poly::{rat_to_f64, Monomial, Polynomial, Rat};
use crate::rng::SplitMix64;

/// Imaginary-part tolerance for declaring a root real, relative to
/// `1 + |root|`.
pub const ROOT_IM_TOL: f64 = 1e-7;

/// Default bisection ceiling for spectrahedron gauges.
pub const DEFAULT_T_MAX: f64 = 1e6;

// ---------------------------------------------------------------------------
// Univariate roots via the companion matrix
// ---------------------------------------------------------------------------

/// All complex roots of `sum coeffs[k] t^k`, via the balanced companion
/// matrix plus one Newton polish per root. Exact zero roots from trailing
/// zero coefficients are returned as exact zeros.
///
/// The Schur iteration on the companion matrix runs with a bounded
/// iteration count: unshifted QR can cycle indefinitely on companion
/// matrices of even polynomials (root pairs of equal modulus). When it
/// does not converge, a Durand-Kerner sweep takes over.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let max_abs = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    if max_abs == 0.0 {
        return Vec::new();
    }
    // Trim negligible leading coefficients.
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].abs() <= 1e-14 * max_abs {
        deg -= 1;
    }
    // Factor out exact zero roots.
    let mut low = 0;
    while low < deg && coeffs[low] == 0.0 {
        low += 1;
    }
    let mut roots: Vec<Complex<f64>> = vec![Complex::zero(); low];
    let c = &coeffs[low..=deg];
    let n = c.len() - 1;
    if n == 0 {
        return roots;
    }
    if n == 1 {
        roots.push(Complex::new(-c[0] / c[1], 0.0));
        return roots;
    }
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    balance_in_place(&mut m);
    let eigen = bounded_eigenvalues(m).unwrap_or_else(|| durand_kerner(c));
    for z in eigen {
        roots.push(newton_polish(c, z));
    }
    roots
}

/// Eigenvalues through a Schur decomposition with a bounded iteration
/// budget; `None` when the iteration fails to converge.
fn bounded_eigenvalues(m: DMatrix<f64>) -> Option<Vec<Complex<f64>>> {
    let n = m.nrows();
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 100 * n * n)?;
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let subdiag = if i + 1 < n { t[(i + 1, i)] } else { 0.0 };
        let scale = 1.0 + t[(i, i)].abs();
        if i + 1 < n && subdiag.abs() > 1e-300 * scale {
            // 2x2 block: eigenvalues of [[a,b],[c,d]].
            let (a, b) = (t[(i, i)], t[(i, i + 1)]);
            let (c2, d) = (t[(i + 1, i)], t[(i + 1, i + 1)]);
            let tr = a + d;
            let det = a * d - b * c2;
            let disc = tr * tr - 4.0 * det;
            if disc >= 0.0 {
                let s = disc.sqrt();
                out.push(Complex::new(0.5 * (tr + s), 0.0));
                out.push(Complex::new(0.5 * (tr - s), 0.0));
            } else {
                let s = (-disc).sqrt();
                out.push(Complex::new(0.5 * tr, 0.5 * s));
                out.push(Complex::new(0.5 * tr, -0.5 * s));
            }
            i += 2;
        } else {
            out.push(Complex::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    Some(out)
}

/// Durand-Kerner simultaneous iteration on the monic normalization; the
/// asymmetric starting angles break the symmetry that defeats unshifted
/// QR.
fn durand_kerner(c: &[f64]) -> Vec<Complex<f64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    // Cauchy-style radius bound.
    let radius = 1.0
        + monic[..n]
            .iter()
            .fold(0.0f64, |a, x| a.max(x.abs()));
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let theta = 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            Complex::from_polar(radius * 0.7, theta)
        })
        .collect();
    let eval = |x: Complex<f64>| -> Complex<f64> {
        let mut f = Complex::zero();
        for &ck in monic.iter().rev() {
            f = f * x + Complex::new(ck, 0.0);
        }
        f
    };
    for _ in 0..400 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() < 1e-280 {
                continue;
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 * (1.0 + radius) {
            break;
        }
    }
    z
}

/// Norm-equalizing balancing by powers of two, iterated to convergence.
fn balance_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if i != j {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let mut cc = c;
            let s = c + r;
            while cc < r / radix {
                f *= radix;
                cc *= radix * radix;
            }
            while cc > r * radix {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r / f) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
        if converged {
            return;
        }
    }
}

fn newton_polish(c: &[f64], z: Complex<f64>) -> Complex<f64> {
    let mut f: Complex<f64> = Complex::zero();
    let mut df: Complex<f64> = Complex::zero();
    for &ck in c.iter().rev() {
        df = df * z + f;
        f = f * z + Complex::new(ck, 0.0);
    }
    if df.norm() > 1e-30 {
        let step = f / df;
        if step.norm() < 0.1 * (1.0 + z.norm()) {
            return z - step;
        }
    }
    z
}

/// Coefficients of `t -> p(base + t dir)` in floating point.
fn affine_line_coeffs(p: &Polynomial, base: &[f64], dir: &[f64]) -> Result<Vec<f64>> {
    let n = p.n_vars();
    if base.len() != n || dir.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: base.len().max(dir.len()),
        });
    }
    let deg = p.degree().unwrap_or(0) as usize;
    let mut out = vec![0.0; deg + 1];
    for (m, coeff) in p.terms() {
        // Expand prod_i (base_i + t dir_i)^{e_i} by convolution.
        let mut term = vec![rat_to_f64(coeff)];
        for (i, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                let mut next = vec![0.0; term.len() + 1];
                for (k, &tk) in term.iter().enumerate() {
                    next[k] += tk * base[i];
                    next[k + 1] += tk * dir[i];
                }
                term = next;
            }
        }
        for (k, &tk) in term.iter().enumerate() {
            out[k] += tk;
        }
    }
    Ok(out)
}

/// Cluster nearly-equal real values (radius `1e-6` relative) to their mean,
/// preserving multiplicity.
fn cluster_roots(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let scale = 1.0 + values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let mut out = Vec::with_capacity(values.len());
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len() && values[j] - values[j - 1] <= 1e-6 * scale {
            j += 1;
        }
        let mean = values[i..j].iter().sum::<f64>() / (j - i) as f64;
        for _ in i..j {
            out.push(mean);
        }
        i = j;
    }
    out
}

// ---------------------------------------------------------------------------
// Verdicts and gauge results
// ---------------------------------------------------------------------------

/// Outcome of a probabilistic real-zero or hyperbolicity probe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RzVerdict {
    pub passed: bool,
    /// Counterexample `(direction, root)` present exactly when the probe
    /// failed; the root is `(re, im)`.
    pub counterexample: Option<(Vec<f64>, (f64, f64))>,
    pub directions_tested: u32,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeStatus {
    /// Smallest positive real root located by companion matrix + Newton.
    ExactRoot,
    /// Located by PSD bisection.
    Bisected,
    /// Feasible beyond the search ceiling.
    Unbounded,
}

/// Gauge of a set along a ray: `sup { t >= 0 : t a inside }`, or unbounded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RayGauge {
    pub direction: Vec<f64>,
    /// `None` encodes an unbounded ray.
    pub gauge: Option<f64>,
    pub status: GaugeStatus,
}

// ---------------------------------------------------------------------------
// Real zero verification
// ---------------------------------------------------------------------------

/// Probe the real zero property on `trials` random unit directions: every
/// complex root of `p(ta)` must be real within `tol (1 + |root|)`. Passing
/// is evidence, not proof.
pub fn real_zero_probe(p: &Polynomial, trials: u32, tol: f64, seed: u64) -> Result<RzVerdict> {
    if p.is_zero() {
        return Err(Error::ZeroAtOrigin);
    }
    let n = p.n_vars();
    if p.constant_term().is_zero() {
        // A real zero polynomial never vanishes at the origin.
        return Ok(RzVerdict {
            passed: false,
            counterexample: Some((vec![0.0; n], (0.0, 0.0))),
            directions_tested: 0,
            tolerance: tol,
        });
    }
    if n == 0 {
        return Ok(RzVerdict {
            passed: true,
            counterexample: None,
            directions_tested: 0,
            tolerance: tol,
        });
    }
    let mut rng = SplitMix64::new(seed);
    for k in 0..trials {
        let a = rng.unit_vector(n);
        let coeffs = p.line_coeffs_f64(&a)?;
        for z in poly_roots(&coeffs) {
            if z.im.abs() > tol * (1.0 + z.norm()) {
                return Ok(RzVerdict {
                    passed: false,
                    counterexample: Some((a, (z.re, z.im))),
                    directions_tested: k + 1,
                    tolerance: tol,
                });
            }
        }
    }
    Ok(RzVerdict {
        passed: true,
        counterexample: None,
        directions_tested: trials,
        tolerance: tol,
    })
}

/// Exact certificate for quadratics: `p/p(0) = x^T A x + b^T x + 1` is a
/// real zero polynomial exactly when `b b^T - 4A` is PSD. Returns the
/// certificate matrix and its verdict.
pub fn quadratic_rz_certificate(p: &Polynomial) -> Result<(SymmetricMatrix, PsdVerdict)> {
    if let Some(d) = p.degree() {
        if d > 2 {
            return Err(Error::DegreeBound { got: d, bound: 2 });
        }
    }
    let (a, b) = quadratic_parts(p)?;
    let n = p.n_vars();
    let mut m = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set_sym(i, j, b[i] * b[j] - 4.0 * a.get(i, j));
        }
    }
    let verdict = is_psd(&m);
    Ok((m, verdict))
}

/// Decompose a quadratic (normalized by its constant term) into
/// `x^T A x + b^T x + 1`.
pub fn quadratic_parts(p: &Polynomial) -> Result<(SymmetricMatrix, Vec<f64>)> {
    let p0 = p.constant_term();
    if p0.is_zero() {
        return Err(Error::ZeroAtOrigin);
    }
    let n = p.n_vars();
    let q = p.scale(&(Rat::from(num_bigint::BigInt::from(1)) / p0));
    let mut a = SymmetricMatrix::zeros(n);
    let mut b = vec![0.0; n];
    for i in 0..n {
        b[i] = rat_to_f64(&q.coeff(&Monomial::var(n, i)));
        for j in i..n {
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            let c = rat_to_f64(&q.coeff(&Monomial(e)));
            if i == j {
                a.set_sym(i, i, c);
            } else {
                a.set_sym(i, j, c / 2.0);
            }
        }
    }
    Ok((a, b))
}

// ---------------------------------------------------------------------------
// Gauges
// ---------------------------------------------------------------------------

/// Gauge of the rigidly convex set along `a`: the smallest positive real
/// root of `p(ta)`, or unbounded if there is none. The unbounded flag is
/// conservative: it requires every nearly-real root to have nonpositive
/// real part.
pub fn ray_gauge_c(p: &Polynomial, a: &[f64]) -> Result<RayGauge> {
    if p.constant_term().is_zero() {
        return Err(Error::ZeroAtOrigin);
    }
    let coeffs = p.line_coeffs_f64(a)?;
    let mut best: Option<f64> = None;
    for z in poly_roots(&coeffs) {
        if z.im.abs() <= ROOT_IM_TOL * (1.0 + z.norm()) && z.re > 1e-12 {
            best = Some(best.map_or(z.re, |b: f64| b.min(z.re)));
        }
    }
    Ok(match best {
        Some(t) => {
            let t = polish_real_root(&coeffs, t);
            RayGauge {
                direction: a.to_vec(),
                gauge: Some(t),
                status: GaugeStatus::ExactRoot,
            }
        }
        None => RayGauge {
            direction: a.to_vec(),
            gauge: None,
            status: GaugeStatus::Unbounded,
        },
    })
}

fn polish_real_root(coeffs: &[f64], mut t: f64) -> f64 {
    for _ in 0..2 {
        let mut f = 0.0;
        let mut df = 0.0;
        for &c in coeffs.iter().rev() {
            df = df * t + f;
            f = f * t + c;
        }
        if df.abs() > 1e-30 {
            let step = f / df;
            if step.abs() < 0.1 * (1.0 + t.abs()) {
                t -= step;
            }
        }
    }
    t
}

/// Gauge of a spectrahedron along `a` from the origin by bisection on the
/// PSD verdict, to relative width `1e-9`; unbounded when still feasible at
/// `t_max`. Requires the pencil to be feasible at the origin.
pub fn ray_gauge_s(pencil: &FloatPencil, a: &[f64], t_max: f64) -> Result<RayGauge> {
    let origin = vec![0.0; a.len()];
    line_gauge_s(pencil, &origin, a, t_max)
}

/// Gauge along the line `t -> offset + t dir` for `t >= 0`; the pencil must
/// be feasible at `t = 0`. Valid by convexity: the feasible `t` form an
/// interval containing zero.
///
/// Along the line the pencil is `M(t) = M(offset) + t B`. When `t = 0` is
/// feasible with a clean structure (the kernel of `M(offset)` is shared by
/// `B`), congruence-reducing both matrices to the range of `M(offset)`
/// turns the gauge into the closed form `-1 / lambda_min(B_reduced)`: a
/// single eigensolve, accurate to eigenvalue precision at any scale.
/// Degenerate situations fall back to a bisection on a tightly shifted
/// Cholesky feasibility predicate.
pub fn line_gauge_s(
    pencil: &FloatPencil,
    offset: &[f64],
    dir: &[f64],
    t_max: f64,
) -> Result<RayGauge> {
    let at_offset = pencil.eval(offset)?;
    if is_psd(&at_offset) == PsdVerdict::NotPsd {
        return Err(Error::NotPsd);
    }
    // Direction block: M(offset + t dir) = M(offset) + t B.
    let direction_block = if pencil.is_affine() {
        let mut b = pencil.eval(dir)?;
        b = b.add(&pencil.blocks()[0].scale(-1.0));
        b
    } else {
        pencil.eval(dir)?
    };
    if let Ok(norm) = crate::linalg::monic_normalize(&[at_offset.clone(), direction_block]) {
        if norm.rank == 0 {
            // The pencil vanishes identically along the line.
            return Ok(RayGauge {
                direction: dir.to_vec(),
                gauge: None,
                status: GaugeStatus::Unbounded,
            });
        }
        let reduced = &norm.reduced[1];
        let lambda_min = crate::linalg::min_eigenvalue(reduced)?;
        let cut = 1e-14 * (1.0 + reduced.frobenius_norm());
        if lambda_min >= -cut || -1.0 / lambda_min > t_max {
            return Ok(RayGauge {
                direction: dir.to_vec(),
                gauge: None,
                status: GaugeStatus::Unbounded,
            });
        }
        return Ok(RayGauge {
            direction: dir.to_vec(),
            gauge: Some(-1.0 / lambda_min),
            status: GaugeStatus::Bisected,
        });
    }
    // Fallback: feasibility bisection against the refined PSD predicate.
    let feasible = |t: f64| -> Result<bool> {
        let point: Vec<f64> = offset.iter().zip(dir).map(|(o, d)| o + t * d).collect();
        Ok(crate::linalg::is_psd_refined(&pencil.eval(&point)?))
    };
    if !feasible(0.0)? {
        // Marginal at the very start: the segment degenerates to a point.
        return Ok(RayGauge {
            direction: dir.to_vec(),
            gauge: Some(0.0),
            status: GaugeStatus::Bisected,
        });
    }
    if feasible(t_max)? {
        return Ok(RayGauge {
            direction: dir.to_vec(),
            gauge: None,
            status: GaugeStatus::Unbounded,
        });
    }
    let mut lo = 0.0f64;
    let mut hi = t_max;
    while hi - lo > 3e-12 * (1.0 + hi) {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RayGauge {
        direction: dir.to_vec(),
        gauge: Some(0.5 * (lo + hi)),
        status: GaugeStatus::Bisected,
    })
}

/// Membership in the rigidly convex set: no root of `p(ta)` in `[0, 1)`.
pub fn member_c(p: &Polynomial, a: &[f64]) -> Result<bool> {
    let g = ray_gauge_c(p, a)?;
    Ok(match g.gauge {
        None => true,
        Some(t) => t >= 1.0 - 1e-9,
    })
}

/// Membership verdict for a spectrahedron.
pub fn member_s(pencil: &FloatPencil, a: &[f64]) -> Result<PsdVerdict> {
    Ok(is_psd(&pencil.eval(a)?))
}

// ---------------------------------------------------------------------------
// Hyperbolic polynomials
// ---------------------------------------------------------------------------

fn check_homogeneous(p: &Polynomial) -> Result<u32> {
    let mut degrees = p.terms().map(|(m, _)| m.degree());
    let d = degrees.next().ok_or(Error::ZeroAtOrigin)?;
    if degrees.any(|e| e != d) {
        return Err(Error::NotHyperbolic("polynomial is not homogeneous".into()));
    }
    Ok(d)
}

/// Probe hyperbolicity of a homogeneous polynomial in direction `e`: for
/// random `a`, all roots of `p(a - te)` must be real within tolerance.
pub fn hyperbolicity_probe(
    p: &Polynomial,
    e: &[f64],
    trials: u32,
    tol: f64,
    seed: u64,
) -> Result<RzVerdict> {
    check_homogeneous(p)?;
    let n = p.n_vars();
    if e.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: e.len(),
        });
    }
    if e.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidAnchor("zero hyperbolicity direction".into()));
    }
    let pe = p.eval(e)?;
    if pe.abs() <= 1e-12 {
        // p(e) = 0 rules the direction out immediately.
        return Ok(RzVerdict {
            passed: false,
            counterexample: Some((e.to_vec(), (0.0, 0.0))),
            directions_tested: 0,
            tolerance: tol,
        });
    }
    let neg_e: Vec<f64> = e.iter().map(|x| -x).collect();
    let mut rng = SplitMix64::new(seed);
    for k in 0..trials {
        let a = rng.unit_vector(n);
        let coeffs = affine_line_coeffs(p, &a, &neg_e)?;
        for z in poly_roots(&coeffs) {
            if z.im.abs() > tol * (1.0 + z.norm()) {
                return Ok(RzVerdict {
                    passed: false,
                    counterexample: Some((a, (z.re, z.im))),
                    directions_tested: k + 1,
                    tolerance: tol,
                });
            }
        }
    }
    Ok(RzVerdict {
        passed: true,
        counterexample: None,
        directions_tested: trials,
        tolerance: tol,
    })
}

/// Eigenvalues of `a` with respect to `p` in direction `e`: the roots of
/// `p(a - te)`, all of which must be real within tolerance; returned
/// ascending with multiplicity (clustered at relative radius `1e-6`).
pub fn eigenvalues_dir(p: &Polynomial, e: &[f64], a: &[f64], tol: f64) -> Result<Vec<f64>> {
    check_homogeneous(p)?;
    let pe = p.eval(e)?;
    if pe.abs() <= 1e-12 {
        return Err(Error::NotHyperbolic("p vanishes at the direction".into()));
    }
    let neg_e: Vec<f64> = e.iter().map(|x| -x).collect();
    let coeffs = affine_line_coeffs(p, a, &neg_e)?;
    let mut out = Vec::new();
    for z in poly_roots(&coeffs) {
        if z.im.abs() > tol * (1.0 + z.norm()) {
            return Err(Error::Numerical(format!(
                "non-real eigenvalue {} + {}i beyond tolerance",
                z.re, z.im
            )));
        }
        out.push(z.re);
    }
    Ok(cluster_roots(out))
}

/// The trace of `a` in direction `e`: the multiplicity-weighted sum of
/// eigenvalues, read off the subleading coefficient of `p(a - te)` (so it
/// is exactly linear in `a`).
pub fn trace_dir(p: &Polynomial, e: &[f64], a: &[f64], _tol: f64) -> Result<f64> {
    let d = check_homogeneous(p)?;
    let pe = p.eval(e)?;
    if pe.abs() <= 1e-12 {
        return Err(Error::NotHyperbolic("p vanishes at the direction".into()));
    }
    if d == 0 {
        return Ok(0.0);
    }
    let neg_e: Vec<f64> = e.iter().map(|x| -x).collect();
    let coeffs = affine_line_coeffs(p, a, &neg_e)?;
    let lead = coeffs[d as usize];
    Ok(-coeffs[d as usize - 1] / lead)
}

/// Membership in the hyperbolicity cone: all eigenvalues nonnegative
/// within `1e-9` relative slack.
pub fn cone_member(p: &Polynomial, e: &[f64], a: &[f64], tol: f64) -> Result<bool> {
    let ev = eigenvalues_dir(p, e, a, tol)?;
    let scale = 1.0 + ev.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    Ok(ev.iter().all(|&v| v >= -1e-9 * scale))
}

// ---------------------------------------------------------------------------
// Ray sweeps
// ---------------------------------------------------------------------------

/// One row of a gauge sweep: both gauges along a random unit ray and their
/// ratio (`>= 1` exhibits the slack of the relaxation).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub ray_index: u32,
    pub direction: Vec<f64>,
    /// Gauge of the rigidly convex set (`None` when unbounded).
    pub gauge_c: Option<f64>,
    /// Gauge of the spectrahedral relaxation.
    pub gauge_s: Option<f64>,
    /// `gauge_s / gauge_c`; `1.0` when both are unbounded.
    pub ratio: Option<f64>,
}

/// Sweep random unit rays, comparing the set gauge with the relaxation
/// gauge.
pub fn sweep(p: &Polynomial, pencil: &FloatPencil, rays: u32, seed: u64) -> Result<Vec<SweepRow>> {
    let n = p.n_vars();
    let mut rng = SplitMix64::new(seed);
    let mut rows = Vec::with_capacity(rays as usize);
    for k in 0..rays {
        let dir = rng.unit_vector(n);
        let gc = ray_gauge_c(p, &dir)?;
        let gs = ray_gauge_s(pencil, &dir, DEFAULT_T_MAX)?;
        let ratio = match (gc.gauge, gs.gauge) {
            (Some(c), Some(s)) => Some(s / c),
            (None, None) => Some(1.0),
            _ => None,
        };
        rows.push(SweepRow {
            ray_index: k,
            direction: dir,
            gauge_c: gc.gauge,
            gauge_s: gs.gauge,
            ratio,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moment_table;
    use crate::pencil::build_pencil;
    use crate::poly::rat_i64;

    fn poly(s: &str) -> Polynomial {
        Polynomial::parse(s).unwrap()
    }

    fn disk_pencil() -> FloatPencil {
        let p = poly("1 - x1^2 - x2^2");
        build_pencil(&moment_table(&p, 2, 3).unwrap())
            .unwrap()
            .to_float()
    }

    #[test]
    fn roots_of_simple_polynomials() {
        // t^2 - 1.
        let roots = poly_roots(&[-1.0, 0.0, 1.0]);
        let mut re: Vec<f64> = roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-10 && (re[1] - 1.0).abs() < 1e-10);
        // t^2 + 1 has imaginary roots.
        let roots = poly_roots(&[1.0, 0.0, 1.0]);
        assert!(roots.iter().all(|z| z.im.abs() > 0.9));
        // Constant: no roots; zero polynomial: no roots.
        assert!(poly_roots(&[3.0]).is_empty());
        assert!(poly_roots(&[0.0]).is_empty());
        // Trailing zeros give exact zero roots: t^2 (t - 2).
        let roots = poly_roots(&[0.0, 0.0, -2.0, 1.0]);
        let zeros = roots.iter().filter(|z| z.norm() == 0.0).count();
        assert_eq!(zeros, 2);
    }

    #[test]
    fn even_polynomials_do_not_stall_the_root_finder() {
        // Companion matrices of even polynomials have eigenvalue pairs of
        // equal modulus, the worst case for QR iterations. These must
        // terminate and produce accurate roots.
        let mut rng = SplitMix64::new(61);
        for _ in 0..100 {
            let a = rng.range_f64(0.2, 3.0);
            let b = rng.range_f64(0.2, 3.0);
            // (1 - a^2 t^2)(1 - b^2 t^2).
            let coeffs = [
                1.0,
                0.0,
                -(a * a + b * b),
                0.0,
                a * a * b * b,
            ];
            let mut roots: Vec<f64> = poly_roots(&coeffs)
                .into_iter()
                .map(|z| {
                    assert!(z.im.abs() < 1e-8, "unexpected imaginary root");
                    z.re
                })
                .collect();
            roots.sort_by(f64::total_cmp);
            let mut expect = [-1.0 / a.min(b), -1.0 / a.max(b), 1.0 / a.max(b), 1.0 / a.min(b)];
            expect.sort_by(f64::total_cmp);
            for (r, e) in roots.iter().zip(&expect) {
                assert!((r - e).abs() < 1e-8 * (1.0 + e.abs()), "{r} vs {e}");
            }
        }
    }

    #[test]
    fn wilkinson_style_roots_survive_polish() {
        // prod_{k=1..10} (t - k/4): well separated real roots.
        let mut coeffs = vec![1.0];
        for k in 1..=10 {
            let r = k as f64 / 4.0;
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i] += -r * c;
                next[i + 1] += c;
            }
            coeffs = next;
        }
        let mut roots: Vec<f64> = poly_roots(&coeffs).iter().map(|z| z.re).collect();
        roots.sort_by(f64::total_cmp);
        for (k, r) in roots.iter().enumerate() {
            assert!(
                (r - (k + 1) as f64 / 4.0).abs() < 1e-8,
                "root {k}: {r}"
            );
        }
    }

    #[test]
    fn real_zero_probe_examples() {
        let disk = poly("1 - x1^2 - x2^2");
        assert!(real_zero_probe(&disk, 64, 1e-7, 7).unwrap().passed);
        // 1 + x1^2 fails with roots at -+i.
        let v = real_zero_probe(&poly("1 + x1^2"), 64, 1e-7, 7).unwrap();
        assert!(!v.passed);
        let (_, (re, im)) = v.counterexample.unwrap();
        assert!(re.abs() < 1e-6 && (im.abs() - 1.0).abs() < 1e-6);
        // Vanishing at the origin fails immediately.
        let v = real_zero_probe(&poly("x1 + x1^2"), 64, 1e-7, 7).unwrap();
        assert!(!v.passed);
        assert_eq!(v.directions_tested, 0);
        // Random products of linear polynomials pass.
        let mut rng = SplitMix64::new(21);
        for _ in 0..20 {
            let n = rng.range_i64(1, 4) as usize;
            let k = rng.range_i64(1, 4) as usize;
            let points: Vec<Vec<Rat>> = (0..k)
                .map(|_| (0..n).map(|_| rng.rat(2, 2)).collect())
                .collect();
            let p = crate::moments::DiracSupport::new(n, points)
                .unwrap()
                .product_polynomial();
            assert!(real_zero_probe(&p, 32, 1e-7, rng.next_u64())
                .unwrap()
                .passed);
        }
    }

    #[test]
    fn quadratic_certificate_examples() {
        // Unit disk: b b^T - 4A = 4I is PSD.
        let (m, v) = quadratic_rz_certificate(&poly("1 - x1^2 - x2^2")).unwrap();
        assert_eq!(v, PsdVerdict::Psd);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(0, 1), 0.0);
        // 1 + x1^2: certificate -4 < 0.
        let (m, v) = quadratic_rz_certificate(&poly("1 + x1^2")).unwrap();
        assert_eq!(v, PsdVerdict::NotPsd);
        assert_eq!(m.get(0, 0), -4.0);
        // (1 + x1)^2: boundary case, certificate is exactly 0.
        let (m, v) = quadratic_rz_certificate(&poly("1 + 2*x1 + x1^2")).unwrap();
        assert_eq!(v, PsdVerdict::Psd);
        assert_eq!(m.get(0, 0), 0.0);
        // Degree 3 input is rejected.
        assert!(quadratic_rz_certificate(&poly("1 + x1^3")).is_err());
    }

    #[test]
    fn gauge_c_examples() {
        let disk = poly("1 - x1^2 - x2^2");
        let g = ray_gauge_c(&disk, &[1.0, 0.0]).unwrap();
        assert!((g.gauge.unwrap() - 1.0).abs() < 1e-10);
        // Along (3,4): 1 - 25 t^2 = 0 at t = 1/5.
        let g = ray_gauge_c(&disk, &[3.0, 4.0]).unwrap();
        assert!((g.gauge.unwrap() - 0.2).abs() < 1e-10);
        // 1 + x1 along the positive axis never vanishes.
        let g = ray_gauge_c(&poly("1 + x1"), &[1.0]).unwrap();
        assert_eq!(g.status, GaugeStatus::Unbounded);
        assert!(g.gauge.is_none());
    }

    #[test]
    fn gauge_s_examples() {
        let pencil = disk_pencil();
        let g = ray_gauge_s(&pencil, &[1.0, 0.0], DEFAULT_T_MAX).unwrap();
        assert!((g.gauge.unwrap() - 1.0).abs() < 1e-7);
        // Zero pencil is unbounded along any direction.
        let zero = FloatPencil::new_affine(vec![
            SymmetricMatrix::zeros(2),
            SymmetricMatrix::zeros(2),
        ]);
        let g = ray_gauge_s(&zero, &[1.0], DEFAULT_T_MAX).unwrap();
        assert_eq!(g.status, GaugeStatus::Unbounded);
        // p = 1 + x1: rank-one pencil (1 + x1) [[1,1],[1,1]], boundary at
        // x1 = -1.
        let p = poly("1 + x1");
        let m = build_pencil(&moment_table(&p, 1, 3).unwrap())
            .unwrap()
            .to_float();
        let g = ray_gauge_s(&m, &[-1.0], DEFAULT_T_MAX).unwrap();
        assert!((g.gauge.unwrap() - 1.0).abs() < 1e-6);
        // Infeasible origin errors out.
        let bad = FloatPencil::new_affine(vec![
            SymmetricMatrix::diagonal(&[-1.0]),
            SymmetricMatrix::zeros(1),
        ]);
        assert!(matches!(
            ray_gauge_s(&bad, &[1.0], DEFAULT_T_MAX),
            Err(Error::NotPsd)
        ));
    }

    #[test]
    fn membership_examples() {
        let disk = poly("1 - x1^2 - x2^2");
        let pencil = disk_pencil();
        assert!(member_c(&disk, &[0.5, 0.0]).unwrap());
        assert!(!member_c(&disk, &[1.1, 0.0]).unwrap());
        assert!(member_c(&disk, &[0.0, 0.0]).unwrap());
        assert_eq!(member_s(&pencil, &[0.5, 0.0]).unwrap(), PsdVerdict::Psd);
        assert_eq!(member_s(&pencil, &[1.1, 0.0]).unwrap(), PsdVerdict::NotPsd);
    }

    #[test]
    fn hyperbolicity_probe_examples() {
        // det of the general symmetric 2x2: x1 x3 - x2^2, direction vec(I).
        let det2 = poly("x1*x3 - x2^2");
        let e = [1.0, 0.0, 1.0];
        assert!(hyperbolicity_probe(&det2, &e, 64, 1e-7, 9).unwrap().passed);
        // x1^2 + x2^2 is not hyperbolic in any direction.
        let v = hyperbolicity_probe(&poly("x1^2 + x2^2"), &[1.0, 0.0], 64, 1e-7, 9).unwrap();
        assert!(!v.passed);
        // x1 x2 is hyperbolic with respect to (1,1).
        assert!(hyperbolicity_probe(&poly("x1*x2"), &[1.0, 1.0], 64, 1e-7, 9)
            .unwrap()
            .passed);
        // p(e) = 0 fails immediately.
        let v = hyperbolicity_probe(&poly("x1*x2"), &[1.0, 0.0], 64, 1e-7, 9).unwrap();
        assert!(!v.passed);
        // Non-homogeneous input is an error.
        assert!(hyperbolicity_probe(&poly("1 + x1"), &[1.0], 8, 1e-7, 9).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let p = poly("x1*x2");
        let e = [1.0, 1.0];
        // a = (3,5): p(a - te) = (3-t)(5-t), eigenvalues {3,5}, trace 8.
        let ev = eigenvalues_dir(&p, &e, &[3.0, 5.0], 1e-7).unwrap();
        assert!((ev[0] - 3.0).abs() < 1e-8 && (ev[1] - 5.0).abs() < 1e-8);
        assert!((trace_dir(&p, &e, &[3.0, 5.0], 1e-7).unwrap() - 8.0).abs() < 1e-10);
        // a = e: all eigenvalues 1, trace = deg p.
        let ev = eigenvalues_dir(&p, &e, &e, 1e-7).unwrap();
        assert!(ev.iter().all(|&v| (v - 1.0).abs() < 1e-8));
        assert!((trace_dir(&p, &e, &e, 1e-7).unwrap() - 2.0).abs() < 1e-10);
        // a = 0: all eigenvalues vanish by homogeneity.
        let ev = eigenvalues_dir(&p, &e, &[0.0, 0.0], 1e-7).unwrap();
        assert!(ev.iter().all(|&v| v.abs() < 1e-10));
    }

    #[test]
    fn cone_member_examples() {
        // det X for symmetric 2x2, e = vec(I): the cone is the PSD cone.
        let det2 = poly("x1*x3 - x2^2");
        let e = [1.0, 0.0, 1.0];
        // vec of the positive definite matrix [[2,1],[1,1]].
        assert!(cone_member(&det2, &e, &[2.0, 1.0, 1.0], 1e-7).unwrap());
        // vec(diag(1,-1)) is not in the cone.
        assert!(!cone_member(&det2, &e, &[1.0, 0.0, -1.0], 1e-7).unwrap());
        // The direction itself is in the cone.
        assert!(cone_member(&det2, &e, &e, 1e-7).unwrap());
    }

    #[test]
    fn trace_is_linear_in_a() {
        let p = poly("x1*x3 - x2^2");
        let e = [1.0, 0.0, 1.0];
        let mut rng = SplitMix64::new(55);
        for _ in 0..50 {
            let a: Vec<f64> = (0..3).map(|_| rng.range_f64(-2.0, 2.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.range_f64(-2.0, 2.0)).collect();
            let s = rng.range_f64(-2.0, 2.0);
            let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * y).collect();
            let ta = trace_dir(&p, &e, &a, 1e-7).unwrap();
            let tb = trace_dir(&p, &e, &b, 1e-7).unwrap();
            let tc = trace_dir(&p, &e, &combo, 1e-7).unwrap();
            assert!((tc - (ta + s * tb)).abs() <= 1e-8 * (1.0 + ta.abs() + tb.abs()));
        }
    }

    #[test]
    fn dehomogenization_bridge() {
        // (1, a) lies in the cone of p exactly when a lies in the rigidly
        // convex set of the dehomogenization (light cone example).
        let cone = poly("x1^2 - x2^2 - x3^2");
        let u = [1.0, 0.0, 0.0];
        let q = cone.eval_var(0, &rat_i64(1)).drop_var(0); // 1 - x2^2 - x3^2
        let mut rng = SplitMix64::new(56);
        for _ in 0..100 {
            let a: Vec<f64> = (0..2).map(|_| rng.range_f64(-1.6, 1.6)).collect();
            let r2 = a[0] * a[0] + a[1] * a[1];
            if (r2 - 1.0).abs() < 1e-9 {
                continue;
            }
            let lifted = [1.0, a[0], a[1]];
            let lhs = cone_member(&cone, &u, &lifted, 1e-7).unwrap();
            let rhs = member_c(&q, &a).unwrap();
            assert_eq!(lhs, rhs, "at {a:?}");
        }
    }

    #[test]
    fn shift_invariance_of_membership() {
        // C(p) = C(p(x+a)) + a on sampled verdicts.
        let p = poly("1 - x1^2 - x2^2");
        let anchor = [rat_i64(0), crate::poly::rat_frac(1, 2)];
        let shifted = p.shift(&anchor).unwrap();
        let mut rng = SplitMix64::new(57);
        for _ in 0..100 {
            let b = [rng.range_f64(-1.5, 1.5), rng.range_f64(-1.5, 1.5)];
            let r2 = b[0] * b[0] + b[1] * b[1];
            if (r2 - 1.0).abs() < 1e-6 {
                continue;
            }
            let lhs = member_c(&p, &b).unwrap();
            let rhs = member_c(&shifted, &[b[0], b[1] - 0.5]).unwrap();
            assert_eq!(lhs, rhs, "at {b:?}");
        }
    }

    #[test]
    fn relaxation_containment_sampled() {
        // gauge_C <= gauge_S + 1e-7 for a real zero polynomial.
        let p = poly("1 - x1^2 - x2^2")
            .mul(&Polynomial::parse_with_vars("1 + x1 + x2", 2).unwrap());
        let pencil = build_pencil(&moment_table(&p, 3, 3).unwrap())
            .unwrap()
            .to_float();
        let rows = sweep(&p, &pencil, 64, 58).unwrap();
        for row in rows {
            match (row.gauge_c, row.gauge_s) {
                (Some(c), Some(s)) => assert!(c <= s + 1e-7, "ray {:?}", row.direction),
                (Some(_), None) => {}
                (None, Some(_)) => panic!("relaxation bounded where the set is not"),
                (None, None) => {}
            }
        }
    }

    #[test]
    fn quadratic_exactness_sampled() {
        // For quadratic real zero polynomials the relaxation is exact.
        let p = poly("1 - x1^2 - x2^2");
        let pencil = disk_pencil();
        let rows = sweep(&p, &pencil, 64, 59).unwrap();
        for row in rows {
            let (c, s) = (row.gauge_c.unwrap(), row.gauge_s.unwrap());
            assert!((c - s).abs() <= 1e-6, "ray {:?}: {c} vs {s}", row.direction);
        }
    }

    #[test]
    fn halfspace_contains_rigidly_convex_set() {
        let p = Polynomial::parse_with_vars("1 + 3*x1", 2)
            .unwrap()
            .mul(&Polynomial::parse_with_vars("1 - x1 + x2", 2).unwrap());
        let t = moment_table(&p, 2, 3).unwrap();
        let h = crate::pencil::halfspace(&t).unwrap();
        let mut rng = SplitMix64::new(60);
        for _ in 0..200 {
            let a = [rng.range_f64(-3.0, 3.0), rng.range_f64(-3.0, 3.0)];
            if member_c(&p, &a).unwrap() {
                assert!(h.contains(&a).unwrap(), "halfspace misses {a:?}");
            }
        }
    }
}
