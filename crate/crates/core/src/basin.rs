//! Basin of the zero matrix: eigenvalue classification, the set Σ of
//! (trace, det) pairs on its boundary, the Λ strata, and numerical probes.

use crate::algebra::{eigenvalues, Mat2, C64};
use crate::error::{Error, Result};
use crate::maps::{apply, MapSpec};

pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasinTag {
    Interior,
    Boundary,
    OutsideClosure,
}

impl BasinTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasinTag::Interior => "interior",
            BasinTag::Boundary => "boundary",
            BasinTag::OutsideClosure => "outside-closure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasinVerdict {
    pub tag: BasinTag,
    pub max_eig_modulus: f64,
    pub min_eig_modulus: f64,
}

pub fn basin_classify_phi_id(m: &Mat2, tol: f64) -> BasinVerdict {
    let e = eigenvalues(m);
    let (a, b) = (e.l1.norm(), e.l2.norm());
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let tag = if hi < 1.0 - tol {
        BasinTag::Interior
    } else if (hi - 1.0).abs() <= tol {
        BasinTag::Boundary
    } else {
        BasinTag::OutsideClosure
    };
    BasinVerdict {
        tag,
        max_eig_modulus: hi,
        min_eig_modulus: lo,
    }
}

/// A (trace, determinant) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPoint {
    pub b: C64,
    pub c: C64,
}

/// `|c|² − ½|b|² − ½|b² − 4c| + 1`, zero when `s² − bs + c` has a root of modulus 1
/// (given `|c| ≤ 1`).
pub fn sigma_residual(b: C64, c: C64) -> f64 {
    c.norm_sqr() - 0.5 * b.norm_sqr() - 0.5 * (b * b - 4.0 * c).norm() + 1.0
}

pub fn sigma_membership(b: C64, c: C64, tol: f64) -> bool {
    sigma_residual(b, c).abs() <= tol * (1.0 + b.norm_sqr() + c.norm_sqr()) && c.norm() <= 1.0 + tol
}

/// `(e^{iθ} + u, e^{iθ}u)`: roots `e^{iθ}` and `u`.
pub fn sigma_param(theta: f64, u: C64) -> SigmaPoint {
    let e = C64::from_polar(1.0, theta);
    SigmaPoint { b: e + u, c: e * u }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaTag {
    Lambda0,
    Lambda1,
    Lambda2,
    None,
}

impl LambdaTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            LambdaTag::Lambda0 => "lambda0",
            LambdaTag::Lambda1 => "lambda1",
            LambdaTag::Lambda2 => "lambda2",
            LambdaTag::None => "none",
        }
    }
}

/// Slack on the real-interval test for `(tr)²/det`.
pub const RATIO_TOL: f64 = 1e-9;

pub fn classify_lambda_set(m: &Mat2, tol: f64) -> LambdaTag {
    let tr = m.trace();
    let det = m.det();
    let unit_det = (det.norm() - 1.0).abs() <= tol;
    if unit_det && (tr * tr - 4.0 * det).norm() <= tol * (1.0 + tr.norm_sqr()) {
        return LambdaTag::Lambda1;
    }
    if unit_det {
        let r = tr * tr / det;
        if r.im.abs() <= RATIO_TOL && r.re >= -RATIO_TOL && r.re <= 4.0 - RATIO_TOL {
            return LambdaTag::Lambda2;
        }
    }
    if det.norm() <= tol && (tr.norm() - 1.0).abs() <= tol {
        return LambdaTag::Lambda0;
    }
    LambdaTag::None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmpiricalTag {
    Converged,
    Escaped,
    Undecided,
}

impl EmpiricalTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            EmpiricalTag::Converged => "converged",
            EmpiricalTag::Escaped => "escaped",
            EmpiricalTag::Undecided => "undecided",
        }
    }
}

/// Iterates up to `kappa` times; map errors are returned unchanged.
pub fn empirical_basin(map: &MapSpec, m: &Mat2, kappa: u32, r: f64, eps: f64) -> Result<EmpiricalTag> {
    if kappa == 0 || !(r > 1.0 && 1.0 > eps && eps > 0.0) {
        return Err(Error::InvalidParameter("need kappa >= 1 and R > 1 > eps > 0".into()));
    }
    let mut p = *m;
    for _ in 0..=kappa {
        let n = p.norm();
        if !(n <= r) {
            return Ok(EmpiricalTag::Escaped);
        }
        if n < eps {
            return Ok(EmpiricalTag::Converged);
        }
        p = apply(map, &p)?;
    }
    Ok(EmpiricalTag::Undecided)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QkProbe {
    pub on_quadric: bool,
    /// Smallest `n ≤ k + 2` with `‖Φⁿ(M)‖ ≤ tol·max(1, ‖Φⁿ⁻¹(M)‖²)`.
    pub collapse_step: Option<u32>,
}

/// Tests `det M = 0`, `λᵏx + t/λᵏ = 0` and measures when the orbit hits 0.
pub fn qk_quadric_probe(lambda: C64, m: &Mat2, k: u32, tol: f64) -> Result<QkProbe> {
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidParameter("lambda must be nonzero".into()));
    }
    let lk = lambda.powu(k);
    let a = lk * m.x;
    let b = m.t / lk;
    let scale = 1.0 + m.norm();
    let on_quadric =
        m.det().norm() <= tol * scale * scale && (a + b).norm() <= tol * (1.0 + a.norm() + b.norm());
    let map = MapSpec::PhiDiag(lambda);
    // Φ is quadratic, so rounding at a collapse is of order ‖previous‖².
    let mut p = *m;
    let mut prev = 0.0f64;
    let mut collapse_step = None;
    for n in 0..=k + 2 {
        if p.norm() <= tol * prev.powi(2).max(1.0) {
            collapse_step = Some(n);
            break;
        }
        prev = p.norm();
        p = apply(&map, &p)?;
    }
    Ok(QkProbe {
        on_quadric,
        collapse_step,
    })
}
