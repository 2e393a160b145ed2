"""Smoke test for the framepot extension module.

Build and run from the repository root:

    cargo build --release -p framepot-py --features extension-module
    cp target/release/libframepot_py.so crates/python/python/framepot.so
    PYTHONPATH=crates/python/python python3 crates/python/python/smoke_test.py
"""

import math

import framepot


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    cfg = framepot.repeated_ortho_config(3, 4)
    assert len(cfg) == 4 and cfg.d == 3
    close(cfg.energy(1.3), 2.0, 1e-15)
    close(framepot.multiplicity_energy([2, 3]), 8.0, 0.0)

    g = framepot.GramMatrix([[1.0, 0.5], [0.5, 1.0]])
    close(g.energy(1.0), 1.0, 1e-15)
    assert g.rank_report(2)["within"]

    try:
        framepot.UnitVectorConfiguration(2, [[1.0, 0.0], [0.0, 0.5]])
    except ValueError:
        pass
    else:
        raise AssertionError("non-unit vector accepted")

    p0, q = framepot.p_threshold(1)
    close(p0, 2 * math.log(1.5) / math.log(2), 1e-15)
    close(framepot.m_value(1.0, p0, 4)["value"], 2.0, 1e-9)
    close(framepot.m_bruteforce(1.0, 2.0, 2, 1000), framepot.m_value(1.0, 2.0, 2)["value"], 1e-5)
    assert framepot.check_bound(cfg, p0)["pass"]

    report = framepot.verify_theorem(3)
    assert report["pass"], report["failures"]

    sol = framepot.solve_transition()
    close(sol["alpha_star"], 0.434216900714321, 1e-13)
    close(sol["p_star"], 1.777662518870185, 1e-13)
    close(framepot.five_point_energy(sol["alpha_star"], sol["p_star"]), 8.0, 1e-12)
    assert framepot.subthreshold_witness(1e-3)["energy"] < 8.0

    r = framepot.minimize_energy(3, 4, 1.0, restarts=8, seed=1)
    close(r["best_energy"], 2.0, 1e-6)
    print("smoke test passed")


if __name__ == "__main__":
    main()
