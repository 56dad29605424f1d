"""Smoke test for the matdyn extension module. Run after installing the wheel."""

import cmath
import math

import matdyn


def main() -> None:
    n = matdyn.Mat2(0, 1, 0, 0)
    sq = matdyn.Map("phi-id")
    assert sq(n).norm() == 0.0

    m = matdyn.Mat2(1 + 2j, 0.5, -1j, 3)
    assert abs(sq(m).det() - m.det() ** 2) < 1e-12
    assert matdyn.Mat2.parse(str(m)) == m

    pts, verdict, step = sq.orbit(matdyn.Mat2(0.5, 0, 0, 0.5), 100, eps=1e-12)
    assert verdict == "converged" and step is not None

    rows = matdyn.periodic_phi_id(2)
    assert len(rows) == 16 and all(r[1] in (1, 2) for r in rows)

    assert matdyn.basin_classify_phi_id(matdyn.Mat2(1, 0, 0, 0.5))[0] == "boundary"

    det0 = matdyn.PlanarMap("det0:1")
    assert det0.exit_time((0.1, 0.1), 30.0, 10.0, 75) == 75
    grid = matdyn.render(det0, 30.0, 10.0, 20, 32)
    ppm = grid.to_ppm()
    assert ppm.startswith(b"P6\n32 32\n255\n") and len(ppm) == 13 + 32 * 32 * 3
    assert ppm == matdyn.render(det0, 30.0, 10.0, 20, 32).to_ppm()

    j = cmath.exp(2j * math.pi / 3)
    assert all(abs(matdyn.t_n_lambda(0.5, j, k)) < 1 for k in range(1, 31))
    assert len(matdyn.phi_theta_two_periodic(0.5)) == 7
    assert abs(matdyn.delta_theta(math.pi / 3) + 2.25) < 1e-12

    lines = matdyn.iterate_segment(0.0, 0.0, 1, 0.1)
    assert all(p == (-1.0, 0.0) for p in lines[1])

    try:
        matdyn.Map("nonsense")
    except matdyn.MatdynError:
        pass
    else:
        raise AssertionError("expected MatdynError")

    results = matdyn.selftest(only=[1, 11])
    assert all(passed for _, _, passed, _ in results), results

    print("smoke test passed")


if __name__ == "__main__":
    main()
