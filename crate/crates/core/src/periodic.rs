//! Periodic points: closed-form enumerations and a brute-force cycle oracle.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::algebra::{cr, eigenvalues, jordan_classify, JordanClass, Mat2, C64};
use crate::error::{Error, Result};
use crate::maps::{apply, MapSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Zero,
    DiagTorus,
    XAxisCircle,
    TAxisCircle,
    JordanLine,
    ResonantLine,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Zero => "zero",
            Family::DiagTorus => "diag-torus",
            Family::XAxisCircle => "x-axis-circle",
            Family::TAxisCircle => "t-axis-circle",
            Family::JordanLine => "jordan-line",
            Family::ResonantLine => "resonant-line",
        }
    }
}

/// Which off-diagonal entry is a free parameter of a line family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FreeEntry {
    None,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicPoint {
    pub point: Mat2,
    pub period: u32,
    pub family: Family,
    /// For line families `point` is the representative with the free entry set to 1.
    pub free: FreeEntry,
    /// `‖Φ^period(point) − point‖`.
    pub residual: f64,
}

impl PeriodicPoint {
    /// Whether `m` belongs to the set this entry stands for. With `conjugates`,
    /// anything similar to a diagonal representative also counts.
    pub fn covers(&self, m: &Mat2, tol: f64, conjugates: bool) -> bool {
        let scale = tol * (1.0 + m.norm().max(self.point.norm()));
        let p = &self.point;
        let near = |a: C64, b: C64| (a - b).norm() <= scale;
        let base = match self.free {
            FreeEntry::None => p.dist(m) <= scale,
            FreeEntry::Y => near(p.x, m.x) && near(p.z, m.z) && near(p.t, m.t),
            FreeEntry::Z => near(p.x, m.x) && near(p.y, m.y) && near(p.t, m.t),
        };
        if base || !conjugates || self.free != FreeEntry::None {
            return base;
        }
        if p.y.norm() > scale || p.z.norm() > scale {
            return false;
        }
        let same_spectrum = {
            let e = eigenvalues(m);
            (near(e.l1, p.x) && near(e.l2, p.t)) || (near(e.l1, p.t) && near(e.l2, p.x))
        };
        let diagonalizable = if near(p.x, p.t) {
            jordan_classify(m) == JordanClass::ScalarMultipleOfId
                || (m.y.norm() <= scale && m.z.norm() <= scale && near(m.x, m.t))
        } else {
            true
        };
        same_spectrum && diagonalizable
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceReport {
    pub n: u32,
    pub x: C64,
    pub t: C64,
    pub multiplier: C64,
    pub resonant: bool,
}

pub const ROOT_TOL: f64 = 1e-10;
pub const RESONANCE_TOL: f64 = 1e-10;
pub const PERIOD_TOL: f64 = 1e-9;
/// Largest root-of-unity lattice the enumerations will build.
pub const LATTICE_BUDGET: usize = 1 << 22;

/// `e^{2πik/m}` from the reduced angle.
pub fn root_of_unity(k: u64, m: u64) -> C64 {
    let k = k % m;
    if k == 0 {
        return cr(1.0);
    }
    C64::from_polar(1.0, TAU * k as f64 / m as f64)
}

/// All `m`-th roots of unity in angle order.
pub fn roots_of_unity(m: u64) -> Vec<C64> {
    (0..m).map(|k| root_of_unity(k, m)).collect()
}

fn order(n: u32) -> u64 {
    (1u64 << n) - 1
}

fn check_lattice(n: u32, extra: usize) -> Result<()> {
    let side = order(n) as usize + extra;
    if side.saturating_mul(side) > LATTICE_BUDGET {
        return Err(Error::InvalidParameter(format!(
            "lattice for n = {n} exceeds the budget of {LATTICE_BUDGET} points"
        )));
    }
    Ok(())
}

fn is_root(v: C64, n: u32) -> bool {
    (v.powu(order(n) as u32) - 1.0).norm() <= ROOT_TOL
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Minimal period among the divisors of `n`, with the residual at that period.
/// `None` when the point does not return after `n` steps.
pub fn minimal_period(map: &MapSpec, m: &Mat2, n: u32, tol: f64) -> Option<(u32, f64)> {
    let divs = divisors(n);
    let mut p = *m;
    let bound = tol * (1.0 + m.norm());
    for k in 1..=n {
        p = apply(map, &p).ok()?;
        if !p.is_finite() {
            return None;
        }
        if divs.contains(&k) {
            let r = p.dist(m);
            if r <= bound {
                return Some((k, r));
            }
        }
    }
    None
}

fn finish(mut pts: Vec<PeriodicPoint>) -> Vec<PeriodicPoint> {
    pts.sort_by(|a, b| a.point.lex_cmp(&b.point).then(a.family.cmp(&b.family)));
    pts
}

fn build(map: &MapSpec, n: u32, raw: Vec<(Mat2, Family, FreeEntry)>) -> Result<Vec<PeriodicPoint>> {
    let pts: Result<Vec<_>> = raw
        .into_par_iter()
        .map(|(point, family, free)| {
            let (period, residual) = minimal_period(map, &point, n, PERIOD_TOL).ok_or_else(|| {
                Error::InternalConsistency(format!("enumerated point {point} is not {n}-periodic"))
            })?;
            Ok(PeriodicPoint {
                point,
                period,
                family,
                free,
                residual,
            })
        })
        .collect();
    Ok(finish(pts?))
}

/// Diagonal representatives of the points of period dividing `n` for `M ↦ M²`.
pub fn periodic_phi_id(n: u32) -> Result<Vec<PeriodicPoint>> {
    if !(1..=20).contains(&n) {
        return Err(Error::InvalidParameter("n must lie in 1..=20".into()));
    }
    check_lattice(n, 1)?;
    let roots = roots_of_unity(order(n));
    let zero = cr(0.0);
    let mut raw = vec![(Mat2::ZERO, Family::Zero, FreeEntry::None)];
    for &u in &roots {
        raw.push((Mat2::diag(u, zero), Family::XAxisCircle, FreeEntry::None));
        raw.push((Mat2::diag(zero, u), Family::TAxisCircle, FreeEntry::None));
        for &v in &roots {
            raw.push((Mat2::diag(u, v), Family::DiagTorus, FreeEntry::None));
        }
    }
    build(&MapSpec::PhiId, n, raw)
}

/// `∏_{i<n} (x^{2^i} + λ² t^{2^i})`
pub fn resonance_multiplier(lambda: C64, x: C64, t: C64, n: u32) -> Result<ResonanceReport> {
    for v in [x, t] {
        if !is_root(v, n) {
            return Err(Error::NotRootOfUnity(format!("{v}")));
        }
    }
    let l2 = lambda * lambda;
    let (mut a, mut b) = (x, t);
    let mut mult = cr(1.0);
    for _ in 0..n {
        mult *= a + l2 * b;
        a = a * a;
        b = b * b;
    }
    Ok(ResonanceReport {
        n,
        x,
        t,
        multiplier: mult,
        resonant: (mult - 1.0).norm() <= RESONANCE_TOL,
    })
}

/// Points of period dividing `n` for `M ↦ diag(λ, 1/λ)·M²`.
///
/// In the coordinates `X = λx`, `T = t/λ` the `z = 0` plane evolves as
/// `(X, y, T) ↦ (X², y(X + λ²T), T²)`; the `y = 0` plane is the mirror image
/// with `λ` replaced by `1/λ`.
pub fn periodic_phi_diag(lambda: C64, n: u32, tol: f64) -> Result<Vec<PeriodicPoint>> {
    if lambda.norm() == 0.0 {
        return Err(Error::InvalidParameter("lambda must be nonzero".into()));
    }
    if !(1..=12).contains(&n) {
        return Err(Error::InvalidParameter("n must lie in 1..=12".into()));
    }
    check_lattice(n, 0)?;
    let map = MapSpec::PhiDiag(lambda);
    let roots = roots_of_unity(order(n));
    let (zero, one) = (cr(0.0), cr(1.0));
    let li = lambda.inv();
    let mut raw = vec![(Mat2::ZERO, Family::Zero, FreeEntry::None)];
    for &u in &roots {
        raw.push((Mat2::new(u * li, one, zero, zero), Family::XAxisCircle, FreeEntry::Y));
        raw.push((Mat2::new(zero, zero, one, lambda * u), Family::TAxisCircle, FreeEntry::Z));
    }
    let torus: Vec<_> = roots
        .par_iter()
        .flat_map_iter(|&u| roots.iter().map(move |&v| (u, v)))
        .map(|(u, v)| {
            let mut out = vec![(Mat2::diag(u * li, lambda * v), Family::DiagTorus, FreeEntry::None)];
            let upper = resonance_multiplier(lambda, u, v, n).map(|r| r.multiplier);
            let lower = resonance_multiplier(li, v, u, n).map(|r| r.multiplier);
            if matches!(upper, Ok(m) if (m - 1.0).norm() <= tol) {
                out.push((Mat2::new(u * li, one, zero, lambda * v), Family::ResonantLine, FreeEntry::Y));
            }
            if matches!(lower, Ok(m) if (m - 1.0).norm() <= tol) {
                out.push((Mat2::new(u * li, zero, one, lambda * v), Family::ResonantLine, FreeEntry::Z));
            }
            out
        })
        .flatten_iter()
        .collect();
    raw.extend(torus);
    build(&map, n, raw)
}

/// `B_n = ∏_{i<n}(x^{2^i}+t^{2^i})` and
/// `C_n = Σ_{k=1}^{n} t^{2^k} ∏_{i=k}^{n−1}(x^{2^i}+t^{2^i})`,
/// so that the `y` entry after `n` steps on `z = 0` is `B_n y + C_n`.
pub fn jordan_b_c(x: C64, t: C64, n: u32) -> Result<(C64, C64)> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    // Horner form of the recurrence y ↦ (x_k + t_k) y + t_k².
    let (mut a, mut b) = (x, t);
    let (mut bn, mut cn) = (cr(1.0), cr(0.0));
    for _ in 0..n {
        let s = a + b;
        bn *= s;
        cn = s * cn + b * b;
        a = a * a;
        b = b * b;
    }
    Ok((bn, cn))
}

pub const JORDAN_C_TOL: f64 = 1e-9;

/// Points of period dividing `n` for `M ↦ [[1,1],[0,1]]·M²`.
pub fn periodic_phi_jordan(n: u32) -> Result<Vec<PeriodicPoint>> {
    if !(1..=10).contains(&n) {
        return Err(Error::InvalidParameter("n must lie in 1..=10".into()));
    }
    let roots = roots_of_unity(order(n));
    let (zero, one) = (cr(0.0), cr(1.0));
    let mut raw = vec![(Mat2::ZERO, Family::Zero, FreeEntry::None)];
    for &u in &roots {
        raw.push((Mat2::new(u, one, zero, zero), Family::XAxisCircle, FreeEntry::Y));
        raw.push((Mat2::new(u, -u, zero, u), Family::JordanLine, FreeEntry::None));
    }
    let pairs: Vec<_> = roots
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &u)| {
            roots
                .iter()
                .enumerate()
                .filter(move |(k, _)| *k != i)
                .filter_map(move |(_, &v)| {
                    let (_, cn) = jordan_b_c(u, v, n).ok()?;
                    (cn.norm() <= JORDAN_C_TOL)
                        .then(|| (Mat2::new(u, one, zero, v), Family::ResonantLine, FreeEntry::Y))
                })
        })
        .collect();
    raw.extend(pairs);
    build(&MapSpec::PhiJordan, n, raw)
}

fn infer_family(map: &MapSpec, m: &Mat2, tol: f64) -> Family {
    let s = tol * (1.0 + m.norm());
    let small = |v: C64| v.norm() <= s;
    if m.norm() <= s {
        return Family::Zero;
    }
    let diagonal = small(m.y) && small(m.z);
    if map.is_conjugation_compatible() && !diagonal {
        let e = eigenvalues(m);
        return match (small(e.l1), small(e.l2)) {
            (true, true) => Family::Zero,
            (false, false) => Family::DiagTorus,
            _ if m.x.norm() >= m.t.norm() => Family::XAxisCircle,
            _ => Family::TAxisCircle,
        };
    }
    if diagonal {
        return match (small(m.x), small(m.t)) {
            (false, false) => Family::DiagTorus,
            (false, true) => Family::XAxisCircle,
            _ => Family::TAxisCircle,
        };
    }
    if small(m.z) && small(m.t) {
        Family::XAxisCircle
    } else if small(m.y) && small(m.x) {
        Family::TAxisCircle
    } else if small(m.z) && small(m.x - m.t) {
        Family::JordanLine
    } else {
        Family::ResonantLine
    }
}

/// Candidates returning to themselves after `n` steps, with minimal period
/// and an inferred family tag. Sorted lexicographically.
pub fn brute_force_cycles(map: &MapSpec, candidates: &[Mat2], n: u32, tol: f64) -> Result<Vec<PeriodicPoint>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let found: Vec<PeriodicPoint> = candidates
        .par_iter()
        .filter_map(|m| {
            let (period, residual) = minimal_period(map, m, n, tol)?;
            Some(PeriodicPoint {
                point: *m,
                period,
                family: infer_family(map, m, tol),
                free: FreeEntry::None,
                residual,
            })
        })
        .collect();
    Ok(finish(found))
}
