//! Grid sweep for real solutions of φ²(p) = p in the closed unit disk.

use matdyn::quat::{delta_theta, phi_theta, phi_theta_two_periodic};
use matdyn::sample::{self, DEFAULT_SEED};
use rayon::prelude::*;

const N: usize = 2000;

fn g(th: f64, p: (f64, f64)) -> (f64, f64) {
    let q = phi_theta(th, phi_theta(th, p));
    (q.0 - p.0, q.1 - p.1)
}

fn norm(v: (f64, f64)) -> f64 {
    v.0.hypot(v.1)
}

fn newton(th: f64, mut p: (f64, f64)) -> Option<(f64, f64)> {
    let h = 1e-7;
    for _ in 0..60 {
        let f = g(th, p);
        let (a, b) = (g(th, (p.0 + h, p.1)), g(th, (p.0 - h, p.1)));
        let (cc, d) = (g(th, (p.0, p.1 + h)), g(th, (p.0, p.1 - h)));
        let j = [
            [(a.0 - b.0) / (2.0 * h), (cc.0 - d.0) / (2.0 * h)],
            [(a.1 - b.1) / (2.0 * h), (cc.1 - d.1) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = (-f.0 * j[1][1] + f.1 * j[0][1]) / det;
        let dy = (-f.1 * j[0][0] + f.0 * j[1][0]) / det;
        p = (p.0 + dx, p.1 + dy);
        if norm((dx, dy)) < 1e-15 {
            break;
        }
    }
    (norm(g(th, p)) < 1e-11).then_some(p)
}

fn coord(i: usize) -> f64 {
    -1.0 + 2.0 * (i as f64 + 0.5) / N as f64
}

/// Grid local minima of |φ²(p) − p| inside the disk, polished by Newton.
fn sweep(th: f64) -> Vec<(f64, f64)> {
    let vals: Vec<f64> = (0..N * N)
        .into_par_iter()
        .map(|k| {
            let p = (coord(k % N), coord(k / N));
            if norm(p) > 1.0 + 2.0 / N as f64 {
                f64::INFINITY
            } else {
                norm(g(th, p))
            }
        })
        .collect();
    let mins: Vec<(f64, f64)> = (1..N - 1)
        .into_par_iter()
        .flat_map_iter(|j| {
            let vals = &vals;
            (1..N - 1).filter_map(move |i| {
                let v = vals[j * N + i];
                let local = v.is_finite()
                    && (-1i64..=1).all(|dj| {
                        (-1i64..=1).all(|di| {
                            let w = vals[(j as i64 + dj) as usize * N + (i as i64 + di) as usize];
                            (di == 0 && dj == 0) || v <= w
                        })
                    });
                (local && v < 0.05).then(|| (coord(i), coord(j)))
            })
        })
        .collect();
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for p in mins {
        if let Some(r) = newton(th, p) {
            if norm(r) <= 1.0 + 1e-9 && !roots.iter().any(|q| norm((q.0 - r.0, q.1 - r.1)) < 1e-8) {
                roots.push(r);
            }
        }
    }
    roots
}

#[test]
fn sweep_finds_nothing_outside_catalog() {
    let mut rng = sample::rng(DEFAULT_SEED ^ 0xca7);
    let res = 2.0 / N as f64;
    let mut tested = 0;
    while tested < 50 {
        let th = sample::uniform(&mut rng, 0.0, std::f64::consts::TAU);
        if delta_theta(th).abs() <= 1e-3 || th.cos().abs() < 1e-3 || th.sin().abs() < 1e-3 {
            continue;
        }
        tested += 1;
        let cat = phi_theta_two_periodic(th).unwrap();
        for r in sweep(th) {
            let d = cat
                .points
                .iter()
                .map(|c| norm((c.p.0 - r.0, c.p.1 - r.1)))
                .fold(f64::INFINITY, f64::min);
            assert!(d <= res, "theta={th}: 2-periodic point {r:?} is {d} from the catalogue");
        }
    }
}
