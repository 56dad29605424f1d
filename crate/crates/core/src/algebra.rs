//! Complex 2×2 matrices in `[[x, y], [z, t]]` layout.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Determinants at or below this modulus are treated as singular.
pub const SINGULAR_TOL: f64 = 1e-300;
/// Relative tolerance for the repeated-eigenvalue flag.
pub const REPEATED_TOL: f64 = 1e-10;
/// Tolerance used by [`jordan_classify`].
pub const JORDAN_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Builds a complex number, rejecting NaN and infinities.
pub fn complex(re: f64, im: f64) -> Result<C64> {
    if re.is_finite() && im.is_finite() {
        Ok(C64::new(re, im))
    } else {
        Err(Error::NonFinite)
    }
}

/// Lexicographic `(re, im)` comparison.
pub fn lex_cmp(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub x: C64,
    pub y: C64,
    pub z: C64,
    pub t: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub trace: C64,
    pub det: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub l1: C64,
    pub l2: C64,
    pub repeated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JordanClass {
    ScalarMultipleOfId,
    DiagonalizableDistinct,
    NonDiagonalizable,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 {
        x: C64::new(0.0, 0.0),
        y: C64::new(0.0, 0.0),
        z: C64::new(0.0, 0.0),
        t: C64::new(0.0, 0.0),
    };
    pub const IDENTITY: Mat2 = Mat2 {
        x: C64::new(1.0, 0.0),
        y: C64::new(0.0, 0.0),
        z: C64::new(0.0, 0.0),
        t: C64::new(1.0, 0.0),
    };

    #[inline]
    pub const fn new(x: C64, y: C64, z: C64, t: C64) -> Self {
        Mat2 { x, y, z, t }
    }

    /// Checked constructor; fails on any non-finite component.
    pub fn try_new(x: C64, y: C64, z: C64, t: C64) -> Result<Self> {
        let m = Mat2 { x, y, z, t };
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Real-entry matrix `[[x, y], [z, t]]`.
    pub fn real(x: f64, y: f64, z: f64, t: f64) -> Self {
        Mat2::new(cr(x), cr(y), cr(z), cr(t))
    }

    /// From `[x.re, x.im, y.re, y.im, z.re, z.im, t.re, t.im]`.
    pub fn from_reals(r: [f64; 8]) -> Result<Self> {
        Mat2::try_new(c(r[0], r[1]), c(r[2], r[3]), c(r[4], r[5]), c(r[6], r[7]))
    }

    pub fn to_reals(&self) -> [f64; 8] {
        [
            self.x.re, self.x.im, self.y.re, self.y.im, self.z.re, self.z.im, self.t.re, self.t.im,
        ]
    }

    pub fn diag(x: C64, t: C64) -> Self {
        Mat2::new(x, C64::new(0.0, 0.0), C64::new(0.0, 0.0), t)
    }

    pub fn scalar(s: C64) -> Self {
        Mat2::diag(s, s)
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.x, self.y, self.z, self.t]
    }

    pub fn from_entries(e: [C64; 4]) -> Self {
        Mat2::new(e[0], e[1], e[2], e[3])
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Sup-norm: largest entry modulus.
    pub fn norm(&self) -> f64 {
        self.entries().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.x + self.t
    }

    pub fn det(&self) -> C64 {
        self.x * self.t - self.y * self.z
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.x, self.z, self.y, self.t)
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2::new(s * self.x, s * self.y, s * self.z, s * self.t)
    }

    /// `M²` in the expanded form `[[x²+yz, y(x+t)], [z(x+t), t²+yz]]`.
    pub fn square(&self) -> Self {
        let Mat2 { x, y, z, t } = *self;
        let s = x + t;
        let yz = y * z;
        Mat2::new(x * x + yz, y * s, z * s, t * t + yz)
    }

    /// `M^d` by repeated squaring.
    pub fn powi(&self, mut d: u32) -> Self {
        let mut acc = Mat2::IDENTITY;
        let mut base = *self;
        while d > 0 {
            if d & 1 == 1 {
                acc = acc * base;
            }
            d >>= 1;
            if d > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self> {
        mat_inverse(self)
    }

    /// Sup-norm distance.
    pub fn dist(&self, other: &Mat2) -> f64 {
        (*self - *other).norm()
    }

    /// Lexicographic order on the 8 real components.
    pub fn lex_cmp(&self, other: &Mat2) -> std::cmp::Ordering {
        let a = self.to_reals();
        let b = other.to_reals();
        for i in 0..8 {
            let o = a[i].total_cmp(&b[i]);
            if o.is_ne() {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.x + o.x, self.y + o.y, self.z + o.z, self.t + o.t)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.x - o.x, self.y - o.y, self.z - o.z, self.t - o.t)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.x, -self.y, -self.z, -self.t)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        mat_mul(&self, &o)
    }
}

impl Mul<Mat2> for C64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        m.scale(self)
    }
}

/// Writes the 8-real text form with 17 significant digits.
impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.to_reals();
        for (i, v) in r.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", fmt_real(*v))?;
        }
        Ok(())
    }
}

impl FromStr for Mat2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let vals = parse_reals(s)?;
        if vals.len() != 8 {
            return Err(Error::Parse(format!(
                "expected 8 comma-separated reals, got {}",
                vals.len()
            )));
        }
        let mut r = [0.0; 8];
        r.copy_from_slice(&vals);
        Mat2::from_reals(r).map_err(|_| Error::Parse(format!("non-finite entry in {s:?}")))
    }
}

/// Parses a comma-separated list of finite reals.
pub fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            let v: f64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("not a real number: {p:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("non-finite value: {p:?}")))
            }
        })
        .collect()
}

/// Locale-independent scientific notation, 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    // Normalise -0 so outputs do not depend on sign-of-zero accidents.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    Mat2::new(
        a.x * b.x + a.y * b.z,
        a.x * b.y + a.y * b.t,
        a.z * b.x + a.t * b.z,
        a.z * b.y + a.t * b.t,
    )
}

pub fn mat_inverse(m: &Mat2) -> Result<Mat2> {
    let d = m.det();
    if !(d.norm() > SINGULAR_TOL) {
        return Err(Error::SingularMatrix { det: d.norm() });
    }
    let r = d.inv();
    Ok(Mat2::new(m.t * r, -m.y * r, -m.z * r, m.x * r))
}

pub fn invariants(m: &Mat2) -> Invariants {
    Invariants {
        trace: m.trace(),
        det: m.det(),
    }
}

/// `(t−x)² + 4yz`, the discriminant of the characteristic polynomial.
pub fn discriminant(m: &Mat2) -> C64 {
    let d = m.t - m.x;
    d * d + 4.0 * m.y * m.z
}

pub fn eigenvalues(m: &Mat2) -> EigenPair {
    let tr = m.trace();
    let det = m.det();
    let delta = discriminant(m).sqrt();
    // Pick the sign that avoids cancellation, then recover the other root
    // from the product.
    let (p, q) = (tr + delta, tr - delta);
    let big = if p.norm() >= q.norm() { p } else { q };
    let a = big * 0.5;
    let b = if a.norm() > 0.0 { det / a } else { tr - a };
    let (l1, l2) = if lex_cmp(&a, &b).is_le() { (a, b) } else { (b, a) };
    EigenPair {
        l1,
        l2,
        repeated: delta.norm() <= REPEATED_TOL * (1.0 + m.norm()),
    }
}

pub fn conjugate(p: &Mat2, m: &Mat2) -> Result<Mat2> {
    let pi = mat_inverse(p)?;
    Ok(*p * *m * pi)
}

pub fn jordan_classify(m: &Mat2) -> JordanClass {
    let tol = JORDAN_TOL;
    if m.y.norm() <= tol && m.z.norm() <= tol && (m.x - m.t).norm() <= tol {
        return JordanClass::ScalarMultipleOfId;
    }
    let n = m.norm();
    if discriminant(m).norm() <= tol * (1.0 + n * n) {
        JordanClass::NonDiagonalizable
    } else {
        JordanClass::DiagonalizableDistinct
    }
}
