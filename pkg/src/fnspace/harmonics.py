"""Legendre polynomials and spherical harmonics on S^d.

All integrals on the sphere use the *normalized* surface measure, so the
constant function integrates to 1.  The Legendre polynomials here are the
Gegenbauer family with parameter (d-1)/2 rescaled so that p_m(1) = N(m),
which makes the addition theorem

    sum_l Y_{m,l}(eta) Y_{m,l}(theta) = p_m(eta . theta)

hold with the orthonormal harmonic bases implemented below (trig basis on
the circle, real spherical harmonics on S^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import lpmv

from .errors import ConfigurationError, ContractError, PrecisionError

__all__ = [
    "sphere_area",
    "harmonic_dim",
    "LegendreBasis",
    "legendre_table",
    "harmonic_eval",
    "harmonic_block",
    "ReferenceGrid",
    "reference_grid",
    "project",
]


def sphere_area(d: int) -> float:
    """Surface area omega_d of S^d embedded in R^{d+1}."""
    if d < 0:
        raise ContractError("dimension must be >= 0")
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def harmonic_dim(d: int, m: int) -> int:
    """Dimension N(m) of the degree-m spherical harmonic space on S^d."""
    if m < 0 or d < 1:
        raise ContractError("need m >= 0 and d >= 1")
    if m == 0:
        return 1
    num = (2 * m + d - 1) * math.comb(m + d - 2, d - 1)
    assert num % m == 0
    return num // m


def legendre_table(d: int, m_max: int, t: np.ndarray) -> np.ndarray:
    """Evaluate p_0..p_{m_max} at the points t, shape (m_max+1, len(t)).

    Three-term recurrence on q_m = p_m / p_m(1); stable for every d >= 1
    (at d = 1 it degenerates to the Chebyshev recurrence, giving
    p_m(cos r) = 2 cos(m r)).
    """
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-12):
        raise ContractError("arguments must lie in [-1, 1]")
    t = np.clip(t, -1.0, 1.0)
    lam = (d - 1) / 2.0
    q = np.empty((m_max + 1,) + t.shape)
    q[0] = 1.0
    if m_max >= 1:
        q[1] = t
    for m in range(2, m_max + 1):
        q[m] = (2.0 * (m + lam - 1.0) * t * q[m - 1] - (m - 1.0) * q[m - 2]) / (
            m + 2.0 * lam - 1.0
        )
    dims = np.array([harmonic_dim(d, m) for m in range(m_max + 1)], dtype=float)
    return q * dims.reshape((m_max + 1,) + (1,) * t.ndim)


@dataclass(frozen=True)
class LegendreBasis:
    """Legendre polynomials p_m on [-1,1] for a fixed sphere dimension."""

    d: int
    m_max: int

    def eval(self, m: int, t) -> np.ndarray | float:
        if m > self.m_max:
            raise ContractError(f"degree {m} exceeds m_max={self.m_max}")
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = legendre_table(self.d, m, arr)[m]
        return float(out[0]) if np.isscalar(t) or np.ndim(t) == 0 else out

    def table(self, t: np.ndarray) -> np.ndarray:
        return legendre_table(self.d, self.m_max, t)

    def norm_sq(self, m: int) -> float:
        """Weighted-interval norm ||p_m||^2_{w_d} = (omega_d/omega_{d-1}) N(m)."""
        return sphere_area(self.d) / sphere_area(self.d - 1) * harmonic_dim(self.d, m)


def _circle_angle(eta: np.ndarray) -> np.ndarray:
    return np.arctan2(eta[..., 1], eta[..., 0])


def _sph_norm(m: int, mu: int) -> float:
    # orthonormal under the normalized measure on S^2
    return math.sqrt(
        (2 * m + 1) * math.exp(math.lgamma(m - mu + 1) - math.lgamma(m + mu + 1))
    )


def harmonic_block(d: int, m: int, eta: np.ndarray) -> np.ndarray:
    """All basis values Y_{m,l}(eta), shape (N(m), npoints).

    eta has shape (npoints, d+1) with unit rows.  Bases: on S^1 the pair
    {sqrt2 cos(m phi), sqrt2 sin(m phi)}; on S^2 real spherical harmonics,
    both orthonormal under the normalized measure.
    """
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    if d == 1:
        phi = _circle_angle(eta)
        if m == 0:
            return np.ones((1, len(eta)))
        return np.vstack(
            [math.sqrt(2.0) * np.cos(m * phi), math.sqrt(2.0) * np.sin(m * phi)]
        )
    if d == 2:
        z = np.clip(eta[..., 2], -1.0, 1.0)
        phi = np.arctan2(eta[..., 1], eta[..., 0])
        rows = []
        for mu in range(-m, m + 1):
            p = lpmv(abs(mu), m, z)
            c = _sph_norm(m, abs(mu))
            if mu == 0:
                rows.append(c * p)
            elif mu > 0:
                rows.append(math.sqrt(2.0) * c * p * np.cos(mu * phi))
            else:
                rows.append(math.sqrt(2.0) * c * p * np.sin(-mu * phi))
        return np.vstack(rows)
    raise ConfigurationError(f"harmonic bases implemented for d in {{1,2}}, got d={d}")


def harmonic_eval(d: int, m: int, ell: int, eta: np.ndarray):
    """Single basis function Y_{m,ell}(eta); ell runs from 1 to N(m)."""
    if not 1 <= ell <= harmonic_dim(d, m):
        raise ContractError(f"ell={ell} out of range for N({m})={harmonic_dim(d, m)}")
    eta = np.asarray(eta, dtype=float)
    single = eta.ndim == 1
    out = harmonic_block(d, m, eta)[ell - 1]
    return float(out[0]) if single else out


@dataclass(frozen=True)
class ReferenceGrid:
    """High-accuracy quadrature on S^d: nodes and weights for the normalized measure.

    Integrates spherical polynomials exactly up to `degree`.
    """

    d: int
    degree: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def reference_grid(d: int, degree: int) -> ReferenceGrid:
    if d == 1:
        n = degree + 1
        ang = 2.0 * math.pi * np.arange(n) / n
        nodes = np.column_stack([np.cos(ang), np.sin(ang)])
        w = np.full(n, 1.0 / n)
        return ReferenceGrid(1, degree, nodes, w)
    if d == 2:
        n_z = degree // 2 + 1
        z, wz = np.polynomial.legendre.leggauss(n_z)
        n_phi = degree + 1
        phi = 2.0 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        r = np.sqrt(np.clip(1.0 - zz**2, 0.0, None))
        nodes = np.column_stack(
            [(r * np.cos(pp)).ravel(), (r * np.sin(pp)).ravel(), zz.ravel()]
        )
        w = np.repeat(wz / 2.0, n_phi) / n_phi
        return ReferenceGrid(2, degree, nodes, w)
    raise ConfigurationError(f"reference grids implemented for d in {{1,2}}, got d={d}")


def project(grid: ReferenceGrid, samples: np.ndarray, m: int, margin: int = 4):
    """Harmonic coefficients of g from its samples on the grid, plus Pi_m g.

    Returns (coeffs, evaluator) where coeffs[l-1] = <g, Y_{m,l}> and the
    evaluator computes Pi_m g at arbitrary sphere points.
    """
    if grid.degree < 2 * m + margin:
        raise PrecisionError(
            f"grid degree {grid.degree} too coarse for projection onto degree {m}"
        )
    samples = np.asarray(samples, dtype=float)
    if samples.shape != grid.weights.shape:
        raise ContractError("sample count must match grid size")
    block = harmonic_block(grid.d, m, grid.nodes)
    coeffs = block @ (grid.weights * samples)

    def evaluator(eta: np.ndarray) -> np.ndarray:
        return coeffs @ harmonic_block(grid.d, m, eta)

    return coeffs, evaluator
