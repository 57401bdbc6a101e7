import math

import numpy as np
import pytest

from fnspace.errors import ConfigurationError, ContractError
from fnspace.sphere import (
    PointSet,
    generate_points,
    geodesic_distance,
    mesh_norm,
    pointset_from_json,
    pointset_to_json,
    separation,
    thin_to_quasi_uniform,
)

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])

# frozen regression value: dense-grid mesh-norm search at resolution 0.005
FIB400_H = 0.14128961182426011


def test_geodesic_trivial_cases():
    assert geodesic_distance(E1, E1) == 0.0
    assert geodesic_distance(E1, -E1) == pytest.approx(math.pi)
    assert geodesic_distance(E1, E2) == pytest.approx(math.pi / 2.0)


def test_geodesic_contract_checks():
    with pytest.raises(ContractError):
        geodesic_distance(E1, np.array([1.0, 0.0]))
    with pytest.raises(ContractError):
        geodesic_distance(2.0 * E1, E1)


def test_geodesic_triangle_inequality():
    rng = np.random.Generator(np.random.Philox(5))
    for _ in range(50):
        u, v, w = rng.standard_normal((3, 3))
        u, v, w = (x / np.linalg.norm(x) for x in (u, v, w))
        assert geodesic_distance(u, w) <= (
            geodesic_distance(u, v) + geodesic_distance(v, w) + 1e-10
        )


def test_equispaced_circle_exact_diagnostics():
    ps = generate_points(1, 4, "equispaced_circle")
    assert ps.h == pytest.approx(math.pi / 4.0, abs=1e-12)
    assert ps.h_sep == pytest.approx(math.pi / 2.0, abs=1e-12)
    assert ps.h_resolution == 0.0
    ps8 = generate_points(1, 8, "equispaced_circle")
    assert ps8.h == pytest.approx(math.pi / 8.0, abs=1e-12)


def test_fibonacci_regression_and_scaling():
    ps = generate_points(2, 400, "fibonacci_s2", resolution=0.005)
    assert ps.h == pytest.approx(FIB400_H, abs=1e-9)
    assert ps.h * math.sqrt(400) < 3.0
    h100 = generate_points(2, 100, "fibonacci_s2", resolution=0.005).h
    assert ps.h / h100 == pytest.approx(0.5, rel=0.2)


def test_fibonacci_mesh_norm_exponent():
    ns = (64, 128, 256, 512, 1024)
    hs = [generate_points(2, n, "fibonacci_s2", resolution=0.005).h for n in ns]
    slope = np.polyfit(np.log(ns), np.log(hs), 1)[0]
    assert -0.6 <= slope <= -0.4


def test_uniform_random_determinism():
    a = generate_points(2, 100, "uniform_random", seed=11)
    b = generate_points(2, 100, "uniform_random", seed=11)
    assert a.h == b.h
    np.testing.assert_array_equal(a.points, b.points)
    c = generate_points(2, 100, "uniform_random", seed=12)
    assert not np.array_equal(a.points, c.points)


def test_uniform_random_mesh_norm_bound():
    n = 256
    meds = [
        generate_points(2, n, "uniform_random", seed=s).h for s in range(20)
    ]
    assert np.median(meds) <= 3.0 * (n / math.log(n)) ** -0.5


def test_covering_packing_consistency():
    sets = [
        generate_points(1, 16, "equispaced_circle"),
        generate_points(2, 128, "fibonacci_s2"),
        generate_points(2, 64, "uniform_random", seed=4),
    ]
    for ps in sets:
        assert ps.h_sep <= 2.0 * ps.h + 2.0 * ps.h_resolution


def test_petrushev_tensor_structure():
    ps = generate_points(2, 100, "petrushev_tensor")
    np.testing.assert_allclose(np.linalg.norm(ps.points, axis=1), 1.0, atol=1e-12)
    assert 0.5 * 100 <= ps.n <= 2 * 100


def test_band_with_poly_completion():
    ps = generate_points(2, 100, "band_with_poly_completion", k=2, lam=1.0)
    assert ps.n == 100
    cap = ps.points[: math.comb(2 + 2, 2)]
    assert np.all(cap[:, 2] > 1.0 / math.sqrt(2.0) - 1e-9)
    with pytest.raises(ConfigurationError):
        generate_points(2, 3, "band_with_poly_completion", k=2, lam=1.0)


def test_generate_points_bad_configs():
    with pytest.raises(ConfigurationError):
        generate_points(2, 10, "equispaced_circle")
    with pytest.raises(ConfigurationError):
        generate_points(1, 10, "fibonacci_s2")
    with pytest.raises(ConfigurationError):
        generate_points(1, 10, "no_such_strategy")


def test_mesh_norm_singleton():
    pt = np.array([[0.0, 0.0, 1.0]])
    h = mesh_norm(pt, 2, resolution=0.02)
    assert h == pytest.approx(math.pi, abs=0.05)


def test_mesh_norm_accepts_pointset():
    ps = generate_points(1, 8, "equispaced_circle")
    assert mesh_norm(ps) == pytest.approx(math.pi / 8.0, abs=1e-12)


def test_duplicate_points_rejected():
    pts = np.array([[1.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ContractError):
        PointSet(1, pts, 1.0, separation(pts), 0.0)


def test_thinning_keeps_equispaced():
    ps = generate_points(1, 16, "equispaced_circle")
    out = thin_to_quasi_uniform(ps, 2.0)
    assert out.n == ps.n


def test_thinning_drops_near_duplicate():
    ang = np.array([0.0, 1e-6, math.pi / 2.0, math.pi, 3.0 * math.pi / 2.0])
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    ps = PointSet(1, pts, mesh_norm(pts, 1), separation(pts), 0.0)
    out = thin_to_quasi_uniform(ps, 2.0)
    assert out.n == 4


def test_thinning_quasi_uniform_ratio():
    ps = generate_points(2, 500, "uniform_random", seed=9)
    out = thin_to_quasi_uniform(ps, 2.0)
    assert out.h_sep / out.h >= 1.0 / (2.0 * 2.0)


def test_json_roundtrip():
    ps = generate_points(2, 50, "fibonacci_s2", resolution=0.02)
    back = pointset_from_json(pointset_to_json(ps))
    np.testing.assert_array_equal(back.points, ps.points)
    assert back.h == ps.h and back.h_sep == ps.h_sep and back.d == ps.d
    assert back.strategy == ps.strategy
