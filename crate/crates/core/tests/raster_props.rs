use matdyn::maps::PlanarMapSpec;
use matdyn::raster::{grid_to_ppm, render, ControlTriple, Domain, SENTINEL};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phi_theta_grids_in_range(th in -3.2f64..3.2, px in 8usize..48, kappa in 1u32..40) {
        let c = ControlTriple::new(0.99f64.sqrt(), 1.0, kappa).unwrap();
        let g = render(&PlanarMapSpec::PhiTheta(th), &c, px, px, Domain::UnitDisk).unwrap();
        for (k, &v) in g.values.iter().enumerate() {
            let (x, y) = g.center(k % px, k / px);
            if x.hypot(y) > 1.0 {
                prop_assert_eq!(v, SENTINEL);
            } else {
                prop_assert!((0..=kappa as i32).contains(&v));
            }
        }
    }

    #[test]
    fn renders_are_byte_identical(th in -3.2f64..3.2, px in 8usize..64, py in 8usize..64) {
        let c = ControlTriple::new(0.99f64.sqrt(), 1.0, 30).unwrap();
        let map = PlanarMapSpec::PhiTheta(th);
        let a = grid_to_ppm(&render(&map, &c, px, py, Domain::UnitDisk).unwrap(), 30);
        let b = grid_to_ppm(&render(&map, &c, px, py, Domain::UnitDisk).unwrap(), 30);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn phi_zero_symmetric(px in 8usize..64, py in 8usize..64) {
        let c = ControlTriple::new(0.99f64.sqrt(), 1.0, 40).unwrap();
        let g = render(&PlanarMapSpec::PhiTheta(0.0), &c, px, py, Domain::UnitDisk).unwrap();
        for iy in 0..py {
            for ix in 0..px {
                prop_assert_eq!(g.get(ix, iy), g.get(ix, py - 1 - iy));
            }
        }
    }

    #[test]
    fn det0_band_is_basin(px in 20usize..160, kappa in 1u32..=75) {
        let c = ControlTriple::new(30.0, 10.0, kappa).unwrap();
        let g = render(&PlanarMapSpec::DetZeroSlice(1.0), &c, px, px, Domain::Square).unwrap();
        for iy in 0..px {
            for ix in 0..px {
                let (x, t) = g.center(ix, iy);
                if (x + t).abs() < 1.0 - 2.0 / px as f64 {
                    prop_assert_eq!(g.get(ix, iy), kappa as i32);
                }
            }
        }
    }
}
