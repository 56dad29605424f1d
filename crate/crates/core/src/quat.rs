//! Restriction of `M ↦ AM²` to quaternions, with `A = diag(e^{iθ}, e^{−iθ})`.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use crate::algebra::{Mat2, C64};
use crate::error::{Error, Result};

/// The quaternion `[[x, y], [−ȳ, x̄]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub x: C64,
    pub y: C64,
}

impl Quaternion {
    pub fn new(x: C64, y: C64) -> Self {
        Quaternion { x, y }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr()
    }

    pub fn to_mat(&self) -> Mat2 {
        Mat2::new(self.x, self.y, -self.y.conj(), self.x.conj())
    }
}

pub fn f_theta(theta: f64, q: &Quaternion) -> Quaternion {
    let e = C64::from_polar(1.0, theta);
    let Quaternion { x, y } = *q;
    Quaternion {
        x: e * (x * x - y.norm_sqr()),
        y: e * y * (2.0 * x.re),
    }
}

pub fn phi_theta(theta: f64, p: (f64, f64)) -> (f64, f64) {
    let (x1, x2) = p;
    let (s, c) = theta.sin_cos();
    let q = 2.0 * x1 * x1 - 1.0;
    let m = x1 * x2;
    (c * q - 2.0 * s * m, 2.0 * c * m + s * q)
}

/// `θ` reduced to `[0, 2π)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointTag {
    /// `(cos θ, −sin θ)` on the unit circle.
    A,
    B1,
    B2,
    /// `j·e^{−iθ}`
    C1,
    /// `j²·e^{−iθ}`
    C2,
    D1,
    D2,
}

impl PointTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointTag::A => "a",
            PointTag::B1 => "b1",
            PointTag::B2 => "b2",
            PointTag::C1 => "c1",
            PointTag::C2 => "c2",
            PointTag::D1 => "d1",
            PointTag::D2 => "d2",
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, PointTag::A | PointTag::B1 | PointTag::B2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogPoint {
    pub tag: PointTag,
    pub p: (f64, f64),
    pub in_unit_disk: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPeriodicCatalog {
    pub points: Vec<CatalogPoint>,
    pub delta: f64,
}

const ANGLE_TOL: f64 = 1e-12;

fn in_range(th: f64, lo: f64, hi: f64) -> bool {
    th >= lo - ANGLE_TOL && th <= hi + ANGLE_TOL
}

/// Fixed points of `φ_θ`: one on the circle and the pair off it.
pub fn phi_theta_fixed_points(theta: f64) -> Result<Vec<CatalogPoint>> {
    let th = canonical_angle(theta);
    let (s, c) = th.sin_cos();
    if s.abs() < ANGLE_TOL {
        return Err(Error::DegenerateAngle(theta));
    }
    let a = CatalogPoint {
        tag: PointTag::A,
        p: (c, -s),
        in_unit_disk: true,
    };
    let b1 = CatalogPoint {
        tag: PointTag::B1,
        p: (-0.5, (c - 1.0) / (2.0 * s)),
        in_unit_disk: in_range(th, 0.0, 2.0 * PI / 3.0) || in_range(th, 4.0 * PI / 3.0, TAU),
    };
    let b2 = CatalogPoint {
        tag: PointTag::B2,
        p: (0.5, -(c + 1.0) / (2.0 * s)),
        in_unit_disk: in_range(th, PI / 3.0, 5.0 * PI / 3.0),
    };
    Ok(vec![a, b1, b2])
}

/// `(4c²−3)(2c³−3c²+2)(2c³+3c²−2)(c−1)(c+1)` with `c = cos θ`.
pub fn delta_theta(theta: f64) -> f64 {
    let c = theta.cos();
    let c2 = c * c;
    let c3 = c2 * c;
    (4.0 * c2 - 3.0) * (2.0 * c3 - 3.0 * c2 + 2.0) * (2.0 * c3 + 3.0 * c2 - 2.0) * (c - 1.0) * (c + 1.0)
}

pub const DELTA_TOL: f64 = 1e-8;

/// All seven real points of period dividing 2.
pub fn phi_theta_two_periodic(theta: f64) -> Result<TwoPeriodicCatalog> {
    let delta = delta_theta(theta);
    let th = canonical_angle(theta);
    let (s, c) = th.sin_cos();
    // The off-circle 2-cycle runs off to infinity as cos θ → 0.
    if delta.abs() <= DELTA_TOL || c.abs() < DELTA_TOL {
        return Err(Error::DegenerateAngle(theta));
    }
    let mut points = phi_theta_fixed_points(theta)?;
    let on_circle = |tag, ang: f64| CatalogPoint {
        tag,
        p: (ang.cos(), ang.sin()),
        in_unit_disk: true,
    };
    points.push(on_circle(PointTag::C1, 2.0 * PI / 3.0 - th));
    points.push(on_circle(PointTag::C2, 4.0 * PI / 3.0 - th));

    let r = (1.0 + 4.0 * c * c).sqrt();
    let d_in = in_range(th, 0.0, FRAC_PI_4)
        || in_range(th, 3.0 * FRAC_PI_4, 5.0 * FRAC_PI_4)
        || in_range(th, 7.0 * FRAC_PI_4, TAU);
    points.push(CatalogPoint {
        tag: PointTag::D1,
        p: ((r - 1.0) / (4.0 * c), s * (r + 1.0) / (4.0 * c * c)),
        in_unit_disk: d_in,
    });
    points.push(CatalogPoint {
        tag: PointTag::D2,
        p: (-(r + 1.0) / (4.0 * c), s * (1.0 - r) / (4.0 * c * c)),
        in_unit_disk: d_in,
    });

    for pt in &points {
        let back = phi_theta(th, phi_theta(th, pt.p));
        let err = (back.0 - pt.p.0).hypot(back.1 - pt.p.1);
        if !(err <= 1e-9 * (1.0 + pt.p.0.hypot(pt.p.1))) {
            return Err(Error::InternalConsistency(format!(
                "point {} fails the period-2 check at theta = {theta} (error {err:e})",
                pt.tag.as_str()
            )));
        }
    }
    Ok(TwoPeriodicCatalog { points, delta })
}

/// `∏_{i<n} (1 + λ² v^{2^i})`
pub fn t_n_lambda(lambda: f64, v: C64, n: u32) -> C64 {
    let l2 = lambda * lambda;
    let mut acc = C64::new(1.0, 0.0);
    let mut w = v;
    for _ in 0..n {
        acc *= 1.0 + l2 * w;
        w = w * w;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c, cr};
    use crate::maps::{apply, MapSpec};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn j() -> C64 {
        C64::from_polar(1.0, 2.0 * PI / 3.0)
    }

    fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
        (a.0 - b.0).hypot(a.1 - b.1)
    }

    #[test]
    fn f_theta_examples() {
        let one = Quaternion::new(cr(1.0), cr(0.0));
        assert_eq!(f_theta(0.0, &one), one);
        for th in [0.0, 0.4, 2.0, -1.3] {
            let r = f_theta(th, &Quaternion::new(cr(0.0), cr(1.0)));
            assert!((r.x + C64::from_polar(1.0, th)).norm() < 1e-15);
            assert_eq!(r.y, cr(0.0));
        }
    }

    #[test]
    fn f_theta_is_restricted_matrix_map() {
        let th = 0.77;
        let q = Quaternion::new(c(0.3, -0.4), c(0.5, 0.1));
        let a = MapSpec::PhiDiag(C64::from_polar(1.0, th));
        let want = apply(&a, &q.to_mat()).unwrap();
        assert!(f_theta(th, &q).to_mat().dist(&want) < 1e-15);
    }

    #[test]
    fn phi_theta_examples() {
        assert_eq!(phi_theta(0.0, (1.0, 0.0)), (1.0, 0.0));
        assert_eq!(phi_theta(0.0, (0.3, 0.5)), (2.0 * 0.09 - 1.0, 0.3));
        assert!(dist(phi_theta(FRAC_PI_2, (0.5, -0.5)), (0.5, -0.5)) < 1e-15);
        for th in [0.0, 1.0, 2.5, -0.7] {
            for s in [-0.9, 0.0, 0.4] {
                assert!(dist(phi_theta(th, (0.0, s)), (-th.cos(), -th.sin())) < 1e-15);
            }
        }
    }

    #[test]
    fn fixed_points_at_right_angle() {
        let f = phi_theta_fixed_points(FRAC_PI_2).unwrap();
        let want = [(0.0, -1.0), (-0.5, -0.5), (0.5, -0.5)];
        for (p, w) in f.iter().zip(want) {
            assert!(dist(p.p, w) < 1e-15, "{p:?}");
            assert!(p.in_unit_disk);
        }
    }

    #[test]
    fn fixed_points_are_fixed_and_flags_match_norm() {
        for k in 1..200 {
            let th = k as f64 * TAU / 200.0 + 1e-3;
            let Ok(f) = phi_theta_fixed_points(th) else { continue };
            for p in f {
                assert!(dist(phi_theta(th, p.p), p.p) < 1e-10 * (1.0 + p.p.0.hypot(p.p.1)));
                let inside = p.p.0.hypot(p.p.1) <= 1.0 + 1e-12;
                assert_eq!(inside, p.in_unit_disk, "theta={th} {p:?}");
            }
        }
        assert_eq!(phi_theta_fixed_points(0.0), Err(Error::DegenerateAngle(0.0)));
        assert!(phi_theta_fixed_points(PI).is_err());
    }

    #[test]
    fn b1_on_circle_at_two_thirds_pi() {
        let f = phi_theta_fixed_points(2.0 * PI / 3.0).unwrap();
        let b1 = f[1];
        assert!((b1.p.0.hypot(b1.p.1) - 1.0).abs() < 1e-15);
        assert!(b1.in_unit_disk);
    }

    #[test]
    fn two_periodic_catalog() {
        for th in [0.3, 0.5, 1.0, 1.3, 2.0, 4.0, -0.2] {
            let cat = phi_theta_two_periodic(th).unwrap();
            assert_eq!(cat.points.len(), 7);
            for p in &cat.points {
                let once = phi_theta(th, p.p);
                if !p.tag.is_fixed() {
                    assert!(dist(once, p.p) > 1e-6, "{th} {p:?}");
                }
                let inside = p.p.0.hypot(p.p.1) <= 1.0 + 1e-12;
                assert_eq!(inside, p.in_unit_disk, "theta={th} {p:?}");
            }
        }
    }

    #[test]
    fn c_pair_at_right_angle() {
        // cos θ = 0 is excluded from the full catalogue; check the pair directly.
        let th = FRAC_PI_2;
        let p1 = ((2.0 * PI / 3.0 - th).cos(), (2.0 * PI / 3.0 - th).sin());
        let p2 = ((4.0 * PI / 3.0 - th).cos(), (4.0 * PI / 3.0 - th).sin());
        assert!(dist(p1, (3f64.sqrt() / 2.0, 0.5)) < 1e-15);
        assert!(dist(p2, (-(3f64.sqrt()) / 2.0, 0.5)) < 1e-15);
        assert!(dist(phi_theta(th, p1), p2) < 1e-15);
        assert!(dist(phi_theta(th, p2), p1) < 1e-15);
        // The other sign choice is only pre-periodic.
        let q = (3f64.sqrt() / 2.0, -0.5);
        assert!(dist(phi_theta(th, phi_theta(th, q)), q) > 0.1);
        assert_eq!(phi_theta_two_periodic(th), Err(Error::DegenerateAngle(th)));
    }

    #[test]
    fn delta_zeros() {
        // 4cos²θ − 3 vanishes at π/6; at π/3 the polynomial is −9/4.
        assert!(delta_theta(PI / 6.0).abs() < 1e-14);
        assert!(phi_theta_two_periodic(PI / 6.0).is_err());
        assert!((delta_theta(PI / 3.0) + 2.25).abs() < 1e-14);
        assert!(phi_theta_two_periodic(0.0).is_err());
        assert!(delta_theta(0.5).abs() > 1e-3);
    }

    #[test]
    fn t_products() {
        assert_eq!(t_n_lambda(0.7, c(0.2, 0.3), 0), cr(1.0));
        let t1 = t_n_lambda(0.5, j(), 1);
        assert!((t1 - c(0.875, 0.25 * 3f64.sqrt() / 2.0)).norm() < 1e-15);
        for n in 0..=20 {
            let t = t_n_lambda(0.5, j(), n);
            assert!(n == 0 || t.norm() < 1.0, "n={n} |T|={}", t.norm());
        }
    }

    fn unit_quat() -> impl Strategy<Value = Quaternion> {
        (
            -1.0f64..1.0,
            -1.0f64..1.0,
            -1.0f64..1.0,
            -1.0f64..1.0,
        )
            .prop_filter("nonzero", |v| v.0.abs() + v.1.abs() + v.2.abs() + v.3.abs() > 1e-3)
            .prop_map(|(a, b, c_, d)| {
                let n = (a * a + b * b + c_ * c_ + d * d).sqrt();
                Quaternion::new(c(a / n, b / n), c(c_ / n, d / n))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn unit_sphere_invariant(q in unit_quat(), th in -7.0f64..7.0) {
            let r = f_theta(th, &q);
            prop_assert!((r.norm_sqr() - 1.0).abs() <= 1e-12);
            let alt = C64::from_polar(1.0, th) * (q.x * q.x + q.x.norm_sqr() - 1.0);
            prop_assert!((alt - r.x).norm() <= 1e-12);
        }

        #[test]
        fn circle_fibers(q in unit_quat(), th in -7.0f64..7.0, eta in 0.0f64..TAU) {
            let rot = Quaternion::new(q.x, q.y * C64::from_polar(1.0, eta));
            let a = f_theta(th, &q);
            let b = f_theta(th, &rot);
            prop_assert!((a.x - b.x).norm() <= 1e-14);
            prop_assert!((a.y.norm() - b.y.norm()).abs() <= 1e-14);
        }

        #[test]
        fn boundary_is_squaring(ang in 0.0f64..TAU, th in -7.0f64..7.0) {
            let x = C64::from_polar(1.0, ang);
            let r = f_theta(th, &Quaternion::new(x, cr(0.0)));
            prop_assert_eq!(r.x, C64::from_polar(1.0, th) * (x * x - 0.0));
        }

        #[test]
        fn disk_preserved(r in 0.0f64..=1.0, a in 0.0f64..TAU, th in -7.0f64..7.0) {
            let p = (r * a.cos(), r * a.sin());
            let q = phi_theta(th, p);
            prop_assert!(q.0.hypot(q.1) <= 1.0 + 1e-12);
        }

        #[test]
        fn ellipses_preserved(x1 in -0.95f64..0.95, x2 in -1.0f64..1.0) {
            let x2 = x2 * (1.0 - x1 * x1).sqrt();
            let e0 = x2 * x2 / (1.0 - x1 * x1);
            let (y1, y2) = phi_theta(0.0, (x1, x2));
            prop_assume!((1.0 - y1 * y1) > 1e-6);
            let e1 = y2 * y2 / (1.0 - y1 * y1);
            prop_assert!((e1 - e0).abs() <= 1e-9 * (1.0 + e0) / (1.0 - y1 * y1));
        }

        #[test]
        fn logistic_and_vertical_lines(x1 in -1.0f64..1.0, x2 in -1.0f64..1.0, x2b in -1.0f64..1.0) {
            prop_assert_eq!(phi_theta(0.0, (x1, 0.0)), (2.0 * x1 * x1 - 1.0, 0.0));
            prop_assert_eq!(phi_theta(0.0, (x1, x2)).0, phi_theta(0.0, (x1, x2b)).0);
        }

        #[test]
        fn pi_conjugate_to_zero(x1 in -1.0f64..1.0, x2 in -1.0f64..1.0) {
            let a = phi_theta(PI, (-x1, -x2));
            let b = phi_theta(0.0, (x1, x2));
            prop_assert!(dist(a, (-b.0, -b.1)) <= 1e-15);
        }
    }
}
