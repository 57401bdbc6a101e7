import math

import numpy as np
import pytest

from fnspace.errors import ContractError, PrecisionError
from fnspace.harmonics import (
    LegendreBasis,
    harmonic_block,
    harmonic_dim,
    harmonic_eval,
    legendre_table,
    project,
    reference_grid,
    sphere_area,
)

rng = np.random.Generator(np.random.Philox(42))


def random_sphere(d, n):
    g = rng.standard_normal((n, d + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def test_sphere_area_known_values():
    assert sphere_area(1) == pytest.approx(2.0 * math.pi)
    assert sphere_area(2) == pytest.approx(4.0 * math.pi)
    assert sphere_area(0) == pytest.approx(2.0)


def test_harmonic_dim_values():
    assert harmonic_dim(1, 0) == 1
    assert all(harmonic_dim(1, m) == 2 for m in range(1, 10))
    assert [harmonic_dim(2, m) for m in range(5)] == [1, 3, 5, 7, 9]
    assert harmonic_dim(3, 2) == 9


def test_legendre_normalization_at_one():
    for d in (1, 2, 3):
        table = legendre_table(d, 20, np.array([1.0]))
        dims = [harmonic_dim(d, m) for m in range(21)]
        np.testing.assert_allclose(table[:, 0], dims, rtol=1e-12)


def test_legendre_d1_is_doubled_cosine():
    rho = np.linspace(0.0, math.pi, 7)
    table = legendre_table(1, 12, np.cos(rho))
    for m in range(1, 13):
        np.testing.assert_allclose(table[m], 2.0 * np.cos(m * rho), atol=1e-10)


def test_legendre_domain_check():
    with pytest.raises(ContractError):
        legendre_table(2, 3, np.array([1.5]))


def test_addition_theorem():
    for d in (1, 2):
        eta = random_sphere(d, 12)
        theta = random_sphere(d, 12)
        u = np.clip(np.sum(eta * theta, axis=1), -1.0, 1.0)
        for m in range(21):
            lhs = np.sum(
                harmonic_block(d, m, eta) * harmonic_block(d, m, theta), axis=0
            )
            rhs = legendre_table(d, m, u)[m]
            assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_harmonic_orthonormality():
    for d in (1, 2):
        grid = reference_grid(d, 40)
        blocks = [harmonic_block(d, m, grid.nodes) for m in range(8)]
        flat = np.vstack(blocks)
        gram = (flat * grid.weights) @ flat.T
        np.testing.assert_allclose(gram, np.eye(len(flat)), atol=1e-10)


def test_norm_sq_matches_quadrature():
    # ||p_m||^2 under w_d(t) dt, via t = cos(rho) so the weight is smooth
    for d in (1, 2, 3):
        basis = LegendreBasis(d, 10)
        x, w = np.polynomial.legendre.leggauss(400)
        rho = (x + 1.0) * (math.pi / 2.0)
        jac = (math.pi / 2.0) * np.sin(rho) ** (d - 1)
        for m in (0, 3, 7):
            val = float(np.dot(w, basis.eval(m, np.cos(rho)) ** 2 * jac))
            assert val == pytest.approx(basis.norm_sq(m), rel=1e-8)


def test_harmonic_eval_bounds():
    eta = random_sphere(2, 3)
    with pytest.raises(ContractError):
        harmonic_eval(2, 2, 6, eta)
    v = harmonic_eval(2, 2, 1, eta[0])
    assert isinstance(v, float)


def test_reference_grid_polynomial_exactness():
    for d in (1, 2):
        grid = reference_grid(d, 24)
        assert grid.integrate(np.ones(len(grid.nodes))) == pytest.approx(1.0)
        for m in range(1, 13):
            vals = harmonic_block(d, m, grid.nodes)[0]
            assert abs(grid.integrate(vals)) < 1e-12


def test_project_recovers_bandlimited_coefficients():
    d = 2
    grid = reference_grid(d, 30)
    coeffs = {(2, 3): 0.7, (5, 1): -1.3}
    samples = sum(
        c * harmonic_block(d, m, grid.nodes)[ell - 1] for (m, ell), c in coeffs.items()
    )
    for (m, ell), c in coeffs.items():
        got, evaluator = project(grid, samples, m)
        assert got[ell - 1] == pytest.approx(c, abs=1e-12)
        eta = random_sphere(d, 5)
        np.testing.assert_allclose(
            evaluator(eta), c * harmonic_block(d, m, eta)[ell - 1], atol=1e-10
        )


def test_project_grid_too_coarse():
    grid = reference_grid(1, 10)
    with pytest.raises(PrecisionError):
        project(grid, np.zeros(len(grid.nodes)), 8)
