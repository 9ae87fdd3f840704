"""Smoke test for the stripstat Python bindings.

Build and install first, e.g.
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/stripstat_py-*.whl
"""

import math

import stripstat_py as ss


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    a1, a2, c1, c2 = 0.5, 0.6, 0.3, 0.4
    closed = (1 - a1 * a2 * c1 * c2) / (
        (1 - c1 * c2) * (1 - a1 * c1) * (1 - a1 * c2) * (1 - a2 * c1) * (1 - a2 * c2) * (1 - a1 * a2)
    )
    assert close(ss.partition_geo([a1, a2], c1, c2), closed, 1e-10)

    # Unit times are a normalisation.
    assert 0.0 < ss.laplace_geo([0.5, 0.5], 0.3, 0.4, [2], [0.5]) < 1.0
    assert close(ss.laplace_lg([1.0, 1.0], 0.8, 0.8, [2], [0.0]), 1.0, 1e-8)

    # E[H(1,1)] at N = 1 is -ψ(α+u) - ψ(α+v); ψ(2) = 1 - γ.
    euler = 0.5772156649015329
    assert close(ss.mean_free_energy(1, [1.0], 1.0, 1.0), -2 * (1 - euler), 1e-9)

    # On u + v = 0 the growth rate is exactly -1/24 + u²/2.
    assert close(ss.growth_rate(0.7, -0.7, 10.0), -1 / 24 + 0.245, 1e-7)
    assert ss.phase_limit(1.0, 1.0) == -1 / 24
    rows = ss.phase_scan([(1.0, 1.0), (-0.5, 1.0)], [50.0])
    assert len(rows) == 2 and all(math.isfinite(r[3]) for r in rows)

    paths = ss.sample_geo([0.5, 0.5], 0.3, 0.4, 5, seed=3)
    assert len(paths) == 5 and all(len(p) == 3 for p in paths)
    assert paths == ss.sample_geo([0.5, 0.5], 0.3, 0.4, 5, seed=3)

    checks = ss.verify(1)
    assert checks and all(passed for *_, passed in checks)

    try:
        ss.partition_geo([0.5], 3.0, 0.4)
    except ValueError:
        pass
    else:
        raise AssertionError("a*c1 >= 1 should be rejected")

    try:
        ss.verify(1, tol=1e-30)
    except ArithmeticError:
        pass
    else:
        raise AssertionError("unreachable tolerance should raise")

    print(f"stripstat_py {ss.__version__}: ok")


if __name__ == "__main__":
    main()
