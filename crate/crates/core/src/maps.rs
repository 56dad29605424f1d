//! Matrix maps, the eigenvalue lift, skeleton maps on ℂ² and orbit bookkeeping.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::algebra::{c, cr, mat_inverse, parse_reals, Mat2, C64};
use crate::error::{Error, Result};
use crate::sample;

/// A function of an ordered eigenvalue pair.
#[derive(Clone)]
pub struct Psi {
    name: String,
    f: Arc<dyn Fn(C64, C64) -> C64 + Send + Sync>,
}

impl Psi {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(C64, C64) -> C64 + Send + Sync + 'static,
    {
        Psi {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, a: C64, b: C64) -> C64 {
        (self.f)(a, b)
    }

    /// `λ₁ + (λ₂ − λ₁)²`
    pub fn pasan() -> Self {
        Psi::new("pasan", |a, b| a + (b - a) * (b - a))
    }

    /// First component of the birational map conjugated to the Hénon automorphism.
    pub fn henon() -> Self {
        Psi::new("henon", henon_psi)
    }

    /// `λ₁²`, which lifts to `M ↦ M²`.
    pub fn square() -> Self {
        Psi::new("square", |a, _| a * a)
    }

    /// `λ₁`, which lifts to the identity.
    pub fn first() -> Self {
        Psi::new("first", |a, _| a)
    }
}

impl fmt::Debug for Psi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Psi({})", self.name)
    }
}

pub fn henon_psi(a: C64, b: C64) -> C64 {
    let num = 3.0 * a * a * a - a * a * b + 5.0 * a * b * b + b * b * b
        - 10.0 * a * a
        - 4.0 * a * b
        - 10.0 * b * b
        + 12.0 * a
        + 12.0 * b
        - 8.0;
    let d = a - b;
    num / ((a + b - 2.0) * d * d)
}

#[derive(Debug, Clone)]
pub enum MapSpec {
    PhiId,
    PhiPower { alpha: C64, d: u32 },
    PhiDiag(C64),
    PhiJordan,
    SigmaC(C64),
    ZetaLambda(C64),
    Lifted(Psi),
    PasanLift,
    HenonLift,
}

impl MapSpec {
    pub fn phi_power(alpha: C64, d: u32) -> Result<Self> {
        if alpha.norm() == 0.0 || d < 2 {
            return Err(Error::InvalidParameter(
                "phi-pow needs alpha != 0 and d >= 2".into(),
            ));
        }
        Ok(MapSpec::PhiPower { alpha, d })
    }

    pub fn phi_diag(lambda: C64) -> Result<Self> {
        if lambda.norm() == 0.0 {
            return Err(Error::InvalidParameter("phi-diag needs lambda != 0".into()));
        }
        Ok(MapSpec::PhiDiag(lambda))
    }

    pub fn zeta(lambda: C64) -> Result<Self> {
        if lambda.norm() == 0.0 {
            return Err(Error::InvalidParameter("zeta needs lambda != 0".into()));
        }
        Ok(MapSpec::ZetaLambda(lambda))
    }

    /// `ζ_λ` at `λ = i/2`, a Lattès example.
    pub fn lattes_zeta() -> Self {
        MapSpec::ZetaLambda(c(0.0, 0.5))
    }

    /// True when `P Φ(M) P⁻¹ = Φ(P M P⁻¹)` for every invertible `P`.
    pub fn is_conjugation_compatible(&self) -> bool {
        !matches!(self, MapSpec::PhiDiag(_) | MapSpec::PhiJordan)
    }

    pub fn apply(&self, m: &Mat2) -> Result<Mat2> {
        apply(self, m)
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::PhiId => write!(f, "phi-id"),
            MapSpec::PhiPower { alpha, d } => write!(f, "phi-pow:{},{},{}", alpha.re, alpha.im, d),
            MapSpec::PhiDiag(l) => write!(f, "phi-diag:{},{}", l.re, l.im),
            MapSpec::PhiJordan => write!(f, "phi-jordan"),
            MapSpec::SigmaC(cc) => write!(f, "sigma-c:{},{}", cc.re, cc.im),
            MapSpec::ZetaLambda(l) => write!(f, "zeta:{},{}", l.re, l.im),
            MapSpec::Lifted(p) => write!(f, "lifted:{}", p.name()),
            MapSpec::PasanLift => write!(f, "pasan"),
            MapSpec::HenonLift => write!(f, "henon"),
        }
    }
}

fn split_spec(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (s.trim(), None),
    }
}

fn args(kind: &str, a: Option<&str>, n: usize) -> Result<Vec<f64>> {
    let a = a.ok_or_else(|| Error::Parse(format!("{kind} needs {n} parameter(s)")))?;
    let v = parse_reals(a)?;
    if v.len() != n {
        return Err(Error::Parse(format!(
            "{kind} needs {n} parameter(s), got {}",
            v.len()
        )));
    }
    Ok(v)
}

fn no_args(kind: &str, a: Option<&str>) -> Result<()> {
    match a {
        None => Ok(()),
        Some(_) => Err(Error::Parse(format!("{kind} takes no parameters"))),
    }
}

impl FromStr for MapSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, a) = split_spec(s);
        let bad = |e: Error| match e {
            Error::InvalidParameter(m) => Error::Parse(m),
            e => e,
        };
        match kind {
            "phi-id" => no_args(kind, a).map(|_| MapSpec::PhiId),
            "phi-jordan" => no_args(kind, a).map(|_| MapSpec::PhiJordan),
            "pasan" => no_args(kind, a).map(|_| MapSpec::PasanLift),
            "henon" => no_args(kind, a).map(|_| MapSpec::HenonLift),
            "lattes" => no_args(kind, a).map(|_| MapSpec::lattes_zeta()),
            "phi-pow" => {
                let v = args(kind, a, 3)?;
                if v[2].fract() != 0.0 || v[2] < 2.0 || v[2] > u32::MAX as f64 {
                    return Err(Error::Parse("phi-pow degree must be an integer >= 2".into()));
                }
                MapSpec::phi_power(c(v[0], v[1]), v[2] as u32).map_err(bad)
            }
            "phi-diag" => {
                let v = args(kind, a, 2)?;
                MapSpec::phi_diag(c(v[0], v[1])).map_err(bad)
            }
            "sigma-c" => {
                let v = args(kind, a, 2)?;
                Ok(MapSpec::SigmaC(c(v[0], v[1])))
            }
            "zeta" => {
                let v = args(kind, a, 2)?;
                MapSpec::zeta(c(v[0], v[1])).map_err(bad)
            }
            _ => Err(Error::Parse(format!("unknown map {kind:?}"))),
        }
    }
}

pub fn apply(map: &MapSpec, m: &Mat2) -> Result<Mat2> {
    let Mat2 { x, y, z, t } = *m;
    match map {
        MapSpec::PhiId => Ok(m.square()),
        MapSpec::PhiPower { alpha, d } => Ok(m.powi(*d).scale(*alpha)),
        MapSpec::PhiDiag(l) => {
            let s = x + t;
            let yz = y * z;
            let li = l.inv();
            Ok(Mat2::new(
                l * (x * x + yz),
                l * y * s,
                z * s * li,
                (t * t + yz) * li,
            ))
        }
        MapSpec::PhiJordan => {
            let s = x + t;
            let yz = y * z;
            let q = t * t + yz;
            Ok(Mat2::new(x * x + yz + z * s, y * s + q, z * s, q))
        }
        MapSpec::SigmaC(cc) => {
            let s = m.square();
            Ok(Mat2::new(s.x + cc, s.y, s.z, s.t + cc))
        }
        MapSpec::ZetaLambda(l) => {
            let inv = mat_inverse(m)?;
            Ok((*m + inv).scale(*l))
        }
        MapSpec::Lifted(psi) => lift_apply(psi, m, Branch::Plus),
        MapSpec::PasanLift => lift_apply(&Psi::pasan(), m, Branch::Plus),
        MapSpec::HenonLift => lift_apply(&Psi::henon(), m, Branch::Plus),
    }
}

/// Choice of square root for `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Threshold below which the antisymmetric part is taken by a limit.
pub const LIFT_DELTA_TOL: f64 = 1e-8;

/// Lifts `Ψ` to a conjugation-compatible map on matrices.
pub fn lift_apply(psi: &Psi, m: &Mat2, branch: Branch) -> Result<Mat2> {
    let Mat2 { x, y, z, t } = *m;
    let s = x + t;
    let w = t - x;
    let mut delta = (w * w + 4.0 * y * z).sqrt();
    if branch == Branch::Minus {
        delta = -delta;
    }
    let xi1 = (s + delta) * 0.5;
    let xi2 = (s - delta) * 0.5;
    let a = psi.eval(xi1, xi2);
    let b = psi.eval(xi2, xi1);
    let near = delta.norm() < LIFT_DELTA_TOL * (1.0 + m.norm());
    if !(is_finite(a) && is_finite(b)) {
        return Err(if near {
            Error::IndeterminatePoint
        } else {
            Error::PoleOfPsi
        });
    }
    let sym = a + b;
    let d = if near {
        antisym_limit(psi, s * 0.5)?
    } else {
        (a - b) / delta
    };
    let out = Mat2::new(
        0.5 * (sym - w * d),
        y * d,
        z * d,
        0.5 * (sym + w * d),
    );
    if !out.is_finite() {
        return Err(if near {
            Error::IndeterminatePoint
        } else {
            Error::PoleOfPsi
        });
    }
    Ok(out)
}

/// Limit of `(Ψ(ξ+e/2, ξ−e/2) − Ψ(ξ−e/2, ξ+e/2)) / e` as `e → 0`, with a
/// two-step agreement check that rejects divergent combinations.
fn antisym_limit(psi: &Psi, xi: C64) -> Result<C64> {
    let g = |h: f64| {
        let e = cr(h * 0.5);
        (psi.eval(xi + e, xi - e) - psi.eval(xi - e, xi + e)) / h
    };
    let h = 1e-4 * (1.0 + xi.norm());
    let d1 = g(h);
    let d2 = g(0.5 * h);
    if !(is_finite(d1) && is_finite(d2)) {
        return Err(Error::IndeterminatePoint);
    }
    if (d1 - d2).norm() > 1e-6 * (1.0 + d2.norm()) {
        return Err(Error::IndeterminatePoint);
    }
    // Richardson step cancels the h² term.
    Ok((4.0 * d2 - d1) / 3.0)
}

#[inline]
fn is_finite(v: C64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

/// A point of ℂ² (or ℝ² embedded in it).
pub type Pair = (C64, C64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanarMapSpec {
    SqPhiId,
    SqSigmaC(C64),
    SqZeta,
    DetZeroSlice(f64),
    DetOneSlice(f64),
    PhiTheta(f64),
}

impl PlanarMapSpec {
    pub fn det_zero(lambda: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidParameter("det0 needs a finite lambda != 0".into()));
        }
        Ok(PlanarMapSpec::DetZeroSlice(lambda))
    }

    pub fn det_one(lambda: f64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidParameter("det1 needs a finite lambda != 0".into()));
        }
        Ok(PlanarMapSpec::DetOneSlice(lambda))
    }

    pub fn apply(&self, p: Pair) -> Result<Pair> {
        sq_apply(self, p)
    }

    /// Real-plane evaluation used by the raster code.
    pub fn apply_real(&self, p: (f64, f64)) -> Result<(f64, f64)> {
        let (x, t) = p;
        match *self {
            PlanarMapSpec::DetZeroSlice(l) => {
                let s = x + t;
                Ok((l * x * s, t * s / l))
            }
            PlanarMapSpec::DetOneSlice(l) => {
                let xt = x * t;
                Ok((l * (x * x + xt - 1.0), (t * t + xt - 1.0) / l))
            }
            PlanarMapSpec::PhiTheta(th) => Ok(crate::quat::phi_theta(th, p)),
            _ => {
                let (u, v) = sq_apply(self, (cr(x), cr(t)))?;
                Ok((u.re, v.re))
            }
        }
    }
}

impl fmt::Display for PlanarMapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarMapSpec::SqPhiId => write!(f, "sq-phi-id"),
            PlanarMapSpec::SqSigmaC(cc) => write!(f, "sq-sigma-c:{},{}", cc.re, cc.im),
            PlanarMapSpec::SqZeta => write!(f, "sq-zeta"),
            PlanarMapSpec::DetZeroSlice(l) => write!(f, "det0:{l}"),
            PlanarMapSpec::DetOneSlice(l) => write!(f, "det1:{l}"),
            PlanarMapSpec::PhiTheta(th) => write!(f, "phi-theta:{th}"),
        }
    }
}

impl FromStr for PlanarMapSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, a) = split_spec(s);
        let bad = |e: Error| match e {
            Error::InvalidParameter(m) => Error::Parse(m),
            e => e,
        };
        match kind {
            "sq-phi-id" => no_args(kind, a).map(|_| PlanarMapSpec::SqPhiId),
            "sq-zeta" => no_args(kind, a).map(|_| PlanarMapSpec::SqZeta),
            "sq-sigma-c" => {
                let v = args(kind, a, 2)?;
                Ok(PlanarMapSpec::SqSigmaC(c(v[0], v[1])))
            }
            "det0" => PlanarMapSpec::det_zero(args(kind, a, 1)?[0]).map_err(bad),
            "det1" => PlanarMapSpec::det_one(args(kind, a, 1)?[0]).map_err(bad),
            "phi-theta" => Ok(PlanarMapSpec::PhiTheta(args(kind, a, 1)?[0])),
            _ => Err(Error::Parse(format!("unknown planar map {kind:?}"))),
        }
    }
}

pub fn sq_apply(map: &PlanarMapSpec, p: Pair) -> Result<Pair> {
    let (u, v) = p;
    match *map {
        PlanarMapSpec::SqPhiId => Ok((u * u - 2.0 * v, v * v)),
        PlanarMapSpec::SqSigmaC(cc) => {
            let w = u * u - 2.0 * v;
            Ok((w + 2.0 * cc, v * v + cc * w + cc * cc))
        }
        PlanarMapSpec::SqZeta => {
            if v.norm() == 0.0 {
                return Err(Error::PoleOfMap);
            }
            let r = (u / v + u, v + u * u / v - 2.0 + v.inv());
            if is_finite(r.0) && is_finite(r.1) {
                Ok(r)
            } else {
                Err(Error::PoleOfMap)
            }
        }
        PlanarMapSpec::DetZeroSlice(l) => {
            let s = u + v;
            Ok((l * u * s, v * s / l))
        }
        PlanarMapSpec::DetOneSlice(l) => {
            let uv = u * v;
            Ok((l * (u * u + uv - 1.0), (v * v + uv - 1.0) / l))
        }
        PlanarMapSpec::PhiTheta(th) => {
            let (ct, st) = (th.cos(), th.sin());
            let q = 2.0 * u * u - 1.0;
            let uv = u * v;
            Ok((ct * q - 2.0 * st * uv, 2.0 * ct * uv + st * q))
        }
    }
}

/// A map that can be iterated by [`orbit`].
pub trait Dynamics {
    type Point: Copy;
    fn step(&self, p: &Self::Point) -> Result<Self::Point>;
    fn size(p: &Self::Point) -> f64;
}

impl Dynamics for MapSpec {
    type Point = Mat2;
    fn step(&self, p: &Mat2) -> Result<Mat2> {
        apply(self, p)
    }
    fn size(p: &Mat2) -> f64 {
        p.norm()
    }
}

impl Dynamics for PlanarMapSpec {
    type Point = Pair;
    fn step(&self, p: &Pair) -> Result<Pair> {
        sq_apply(self, *p)
    }
    fn size(p: &Pair) -> f64 {
        p.0.norm().max(p.1.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Escaped(usize),
    Converged(usize),
    Completed,
    /// The map raised an error while computing iterate `step`.
    IndeterminateHit(usize),
}

#[derive(Debug, Clone)]
pub struct OrbitRecord<P> {
    pub points: Vec<P>,
    pub verdict: Verdict,
    pub final_norm: f64,
}

pub fn orbit<D: Dynamics>(
    map: &D,
    seed: D::Point,
    steps: usize,
    escape_r: f64,
    conv_eps: f64,
) -> Result<OrbitRecord<D::Point>> {
    if !(escape_r > 0.0) {
        return Err(Error::InvalidParameter("escape radius must be positive".into()));
    }
    let mut points = vec![seed];
    let mut p = seed;
    let mut norm = D::size(&p);
    let classify = |n: f64, k: usize| {
        if !(n <= escape_r) {
            Some(Verdict::Escaped(k))
        } else if n < conv_eps {
            Some(Verdict::Converged(k))
        } else {
            None
        }
    };
    if let Some(v) = classify(norm, 0) {
        return Ok(OrbitRecord { points, verdict: v, final_norm: norm });
    }
    for k in 1..=steps {
        p = match map.step(&p) {
            Ok(q) => q,
            Err(_) => {
                return Ok(OrbitRecord {
                    points,
                    verdict: Verdict::IndeterminateHit(k),
                    final_norm: norm,
                })
            }
        };
        points.push(p);
        norm = D::size(&p);
        if let Some(v) = classify(norm, k) {
            return Ok(OrbitRecord { points, verdict: v, final_norm: norm });
        }
    }
    Ok(OrbitRecord {
        points,
        verdict: Verdict::Completed,
        final_norm: norm,
    })
}

pub type Jacobian = [[C64; 4]; 4];

/// Central-difference Jacobian in the coordinates `(x, y, z, t)`.
/// Entry `[i][j]` is `∂Φ_i / ∂m_j`.
pub fn jacobian_fd(map: &MapSpec, m: &Mat2, h: f64) -> Result<Jacobian> {
    if !(1e-8..=1e-4).contains(&h) {
        return Err(Error::InvalidParameter("step h must lie in [1e-8, 1e-4]".into()));
    }
    let mut jac = [[C64::new(0.0, 0.0); 4]; 4];
    let base = m.entries();
    for j in 0..4 {
        let mut plus = base;
        let mut minus = base;
        plus[j] += h;
        minus[j] -= h;
        let fp = apply(map, &Mat2::from_entries(plus))?.entries();
        let fm = apply(map, &Mat2::from_entries(minus))?.entries();
        for i in 0..4 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Determinant of a complex 4×4 matrix by partial-pivot elimination.
pub fn det4(a: &Jacobian) -> C64 {
    let mut m = *a;
    let mut det = cr(1.0);
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[piv][col].norm() == 0.0 {
            return cr(0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..4 {
            let f = m[r][col] / m[col][col];
            for k in col..4 {
                let v = m[col][k];
                m[r][k] -= f * v;
            }
        }
    }
    det
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symmetry {
    SigmaP(Mat2),
    Transpose,
    InverseMap,
    ExchangeI,
    FlowFs(f64),
}

impl Symmetry {
    pub fn apply(&self, m: &Mat2) -> Result<Mat2> {
        match self {
            Symmetry::SigmaP(p) => crate::algebra::conjugate(p, m),
            Symmetry::Transpose => Ok(m.transpose()),
            Symmetry::InverseMap => mat_inverse(m),
            Symmetry::ExchangeI => Ok(Mat2::new(m.t, m.y, m.z, m.x)),
            Symmetry::FlowFs(s) => {
                let e = s.exp();
                Ok(Mat2::new(m.x, m.y * e, m.z / e, m.t))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommuteReport {
    pub commutes: bool,
    pub max_residual: f64,
    /// Samples skipped because one side was undefined.
    pub skipped: usize,
}

/// Samples the unit bidisk and compares `g∘Φ` with `Φ∘g`.
pub fn commutes(
    map: &MapSpec,
    g: &Symmetry,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CommuteReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let mut rng = sample::rng(seed);
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for _ in 0..samples {
        let m = sample::mat(&mut rng, 1.0);
        let lhs = apply(map, &m).and_then(|p| g.apply(&p).map(|q| (p, q)));
        let rhs = g.apply(&m).and_then(|gm| apply(map, &gm));
        match (lhs, rhs) {
            (Ok((phi, gphi)), Ok(phig)) => {
                let scale = 1.0 + phi.norm().max(gphi.norm());
                let r = gphi.dist(&phig) / scale;
                worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
            }
            _ => skipped += 1,
        }
    }
    Ok(CommuteReport {
        commutes: worst <= tol && skipped < samples,
        max_residual: worst,
        skipped,
    })
}

/// Residuals of the invariant-function and fibration identities at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantResiduals {
    /// `(y/z)∘Φ − μ·(y/z)`, relative; `None` when the map has no ratio multiplier.
    pub ratio: Option<f64>,
    /// The multiplier `μ` used for `ratio`.
    pub multiplier: Option<C64>,
    /// `((x−t)/z)∘Φ − (x−t)/z`, relative; conjugation-compatible maps only.
    pub cross_ratio: Option<f64>,
    /// `‖Φ(M)M − MΦ(M)‖ / (1 + ‖Φ(M)‖‖M‖)`.
    pub commutator: f64,
}

pub const FIBER_TOL: f64 = 1e-12;

pub fn invariant_residuals(map: &MapSpec, m: &Mat2) -> Result<InvariantResiduals> {
    let p = apply(map, m)?;
    let commutator = (p * *m - *m * p).norm() / (1.0 + p.norm() * m.norm());
    let scale = 1.0 + m.norm();
    if m.z.norm() <= FIBER_TOL * scale || p.z.norm() <= FIBER_TOL * (1.0 + p.norm()) {
        return Err(Error::DegenerateFiber);
    }
    let multiplier = match map {
        MapSpec::PhiDiag(l) => Some(l * l),
        MapSpec::PhiJordan => None,
        _ => Some(cr(1.0)),
    };
    let r0 = m.y / m.z;
    let ratio = multiplier.map(|mu| {
        let r1 = p.y / p.z;
        (r1 - mu * r0).norm() / (1.0 + (mu * r0).norm())
    });
    let cross_ratio = map.is_conjugation_compatible().then(|| {
        let q0 = (m.x - m.t) / m.z;
        let q1 = (p.x - p.t) / p.z;
        (q1 - q0).norm() / (1.0 + q0.norm())
    });
    Ok(InvariantResiduals {
        ratio,
        multiplier,
        cross_ratio,
        commutator,
    })
}
