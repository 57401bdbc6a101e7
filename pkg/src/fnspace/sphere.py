"""Point configurations on the unit sphere S^d in R^{d+1}.

Mesh norm (covering radius) and separation are the two diagnostics that
drive every approximation-rate experiment.  The mesh norm is estimated by
dense-grid search: on the circle it is computed exactly from sorted
angles; on S^2 a Fibonacci search grid with covering radius below the
requested resolution is used, and the reported h is the grid maximum plus
the resolution, so it over-estimates the true mesh norm by at most that
resolution.

Random strategies use numpy's Philox counter-based generator, so a seed
identifies the point set portably.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigurationError, ContractError

__all__ = [
    "geodesic_distance",
    "PointSet",
    "generate_points",
    "mesh_norm",
    "separation",
    "thin_to_quasi_uniform",
    "pointset_to_json",
    "pointset_from_json",
]

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def _check_unit(v: np.ndarray) -> None:
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-12:
        raise ContractError("direction is not a unit vector")


def geodesic_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Great-circle distance arccos(u . v), in [0, pi]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ContractError("directions must have equal dimension")
    _check_unit(u)
    _check_unit(v)
    return float(np.arccos(np.clip(np.dot(u, v), -1.0, 1.0)))


def _pairwise_min_geodesic(points: np.ndarray) -> float:
    g = np.clip(points @ points.T, -1.0, 1.0)
    np.fill_diagonal(g, -1.0)
    return float(np.arccos(np.max(g)))


def separation(points: np.ndarray) -> float:
    """Minimal pairwise geodesic distance."""
    if len(points) < 2:
        return math.pi
    return _pairwise_min_geodesic(np.asarray(points, dtype=float))


@lru_cache(maxsize=8)
def _search_grid(d: int, resolution: float) -> np.ndarray:
    """Covering grid of S^d with covering radius <= resolution."""
    if d == 1:
        n = max(8, int(math.ceil(math.pi / resolution)))
        ang = 2.0 * math.pi * np.arange(n) / n
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if d == 2:
        # Fibonacci grid covering radius is below 2.6/sqrt(N); 3.0 is margin
        n = max(64, int(math.ceil((3.0 / resolution) ** 2)))
        return _fibonacci_sphere(n)
    raise ConfigurationError(f"mesh-norm grid search implemented for d in {{1,2}}")


def _circle_mesh_norm(points: np.ndarray) -> float:
    ang = np.sort(np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * math.pi))
    gaps = np.diff(ang, append=ang[0] + 2.0 * math.pi)
    return float(np.max(gaps)) / 2.0


def _grid_mesh_norm(points: np.ndarray, d: int, resolution: float) -> float:
    if d == 1:
        return _circle_mesh_norm(points)
    grid = _search_grid(d, resolution)
    tree = cKDTree(points)
    chord, _ = tree.query(grid, k=1, workers=-1)
    worst = float(np.max(np.arccos(np.clip(1.0 - chord**2 / 2.0, -1.0, 1.0))))
    return worst + resolution


@dataclass(frozen=True)
class PointSet:
    """Directions on S^d with cached covering/packing diagnostics.

    h over-estimates the true mesh norm by at most h_resolution
    (h_resolution == 0 means h is exact, as on the circle).
    """

    d: int
    points: np.ndarray = field(repr=False)
    h: float
    h_sep: float
    h_resolution: float
    strategy: str = "custom"
    seed: int = 0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.d + 1:
            raise ContractError("points must have shape (n, d+1)")
        if self.h_sep <= 0.0:
            raise ContractError("point set contains duplicate points")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)


def mesh_norm(points, d: int | None = None, resolution: float = 0.01) -> float:
    """Covering radius estimate via dense grid search (exact on the circle).

    Accepts either a PointSet or a raw (n, d+1) coordinate array with d given.
    """
    if isinstance(points, PointSet):
        d = points.d
        points = points.points
    elif d is None:
        raise ContractError("d is required for raw coordinate arrays")
    if resolution <= 0.0:
        raise ContractError("resolution must be positive")
    return _grid_mesh_norm(np.asarray(points, dtype=float), d, resolution)


def _make_pointset(
    points: np.ndarray, d: int, resolution: float, strategy: str, seed: int
) -> PointSet:
    h = _grid_mesh_norm(points, d, resolution)
    res = 0.0 if d == 1 else resolution
    return PointSet(d, points, h, separation(points), res, strategy, seed)


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
    phi = GOLDEN_ANGLE * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _equispaced_circle(n: int, offset: float = 0.0) -> np.ndarray:
    ang = 2.0 * math.pi * np.arange(n) / n + offset
    return np.column_stack([np.cos(ang), np.sin(ang)])


def _uniform_random(d: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.standard_normal((n, d + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _petrushev_tensor(d: int, n: int, seed: int) -> np.ndarray:
    # n1 ~ n^{(d-1)/d} directions on S^{d-1} x n2 ~ n^{1/d} bias levels,
    # normalized onto the band of S^d by (w, b) / sqrt(1 + b^2)
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif d == 2:
        n1 = max(2, round(n ** ((d - 1) / d)))
        dirs = _equispaced_circle(n1)
    else:
        raise ConfigurationError("petrushev_tensor implemented for d in {1,2}")
    n2 = max(1, round(n / len(dirs)))
    b = -1.0 + 2.0 * (np.arange(n2) + 0.5) / n2
    w = np.repeat(dirs, n2, axis=0)
    bb = np.tile(b, len(dirs))
    raw = np.column_stack([w, bb])
    return raw / np.sqrt(1.0 + bb**2)[:, None]


def _band_with_poly_completion(
    d: int, n: int, k: int, lam: float, seed: int
) -> np.ndarray:
    n_cap = math.comb(k + d, d)
    if n < n_cap:
        raise ConfigurationError(
            f"band_with_poly_completion needs n >= C(k+d,d) = {n_cap}"
        )
    z_band = lam / math.sqrt(1.0 + lam**2)
    n_band = n - n_cap
    if d == 1:
        # cap points: small arc near the north pole (inside the upper cap)
        half = 0.5 * (math.pi / 2.0 - math.asin(z_band))
        base = math.pi / 2.0
        cap_ang = base + half * (np.arange(n_cap) - (n_cap - 1) / 2.0) / max(n_cap, 1)
        cap = np.column_stack([np.cos(cap_ang), np.sin(cap_ang)])
        # band: two arcs |sin(angle)| <= z_band, equispaced within each
        amax = math.asin(z_band)
        per = max(n_band // 2, 1)
        a1 = np.linspace(-amax, amax, per)
        a2 = np.pi + np.linspace(-amax, amax, n_band - per) if n_band - per > 0 else []
        ang = np.concatenate([a1, np.asarray(a2, dtype=float)])[:n_band]
        band = np.column_stack([np.cos(ang), np.sin(ang)])
    elif d == 2:
        # cap: Fibonacci patch shrunk into the upper cap
        patch = _fibonacci_sphere(max(n_cap, 4))[:n_cap]
        shrink = 0.4 * (1.0 - z_band)
        z = 1.0 - shrink * (1.0 - patch[:, 2])
        r_old = np.sqrt(np.clip(1.0 - patch[:, 2] ** 2, 1e-30, None))
        r_new = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
        cap = np.column_stack(
            [patch[:, 0] / r_old * r_new, patch[:, 1] / r_old * r_new, z]
        )
        # band: Fibonacci z-profile squeezed into |z| <= z_band
        i = np.arange(n_band)
        z = z_band * (1.0 - (2.0 * i + 1.0) / max(n_band, 1))
        r = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
        phi = GOLDEN_ANGLE * i
        band = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    else:
        raise ConfigurationError("band_with_poly_completion implemented for d in {1,2}")
    points = np.vstack([cap, band])
    _check_cap_independence(points[:n_cap], d, k, seed)
    return points


def _check_cap_independence(cap: np.ndarray, d: int, k: int, seed: int) -> None:
    """Rank check: the cap monomials (theta . x~)^k must be independent."""
    rng = np.random.Generator(np.random.Philox(seed + 0x9E37))
    x = rng.uniform(-1.0, 1.0, size=(4 * len(cap) + 16, d))
    xt = np.column_stack([x, np.ones(len(x))])
    cols = (xt @ cap.T) ** k
    norms = np.linalg.norm(cols, axis=0)
    if np.any(norms == 0.0):
        raise ConfigurationError("degenerate polynomial-completion direction")
    s = np.linalg.svd(cols / norms, compute_uv=False)
    if s[-1] <= 1e-8:
        raise ConfigurationError(
            "polynomial-completion directions are numerically dependent"
        )


def generate_points(
    d: int,
    n: int,
    strategy: str,
    seed: int = 0,
    resolution: float = 0.01,
    offset: float = 0.0,
    k: int = 1,
    lam: float = 1.0,
) -> PointSet:
    """Deterministic point-set generation; h and h_sep are computed on return.

    Strategies: equispaced_circle (d=1), fibonacci_s2 (d=2), uniform_random
    (any supported d), petrushev_tensor, band_with_poly_completion
    (needs k and the domain radius lam).
    """
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    if strategy == "equispaced_circle":
        if d != 1:
            raise ConfigurationError("equispaced_circle requires d=1")
        pts = _equispaced_circle(n, offset)
    elif strategy == "fibonacci_s2":
        if d != 2:
            raise ConfigurationError("fibonacci_s2 requires d=2")
        pts = _fibonacci_sphere(n)
    elif strategy == "uniform_random":
        pts = _uniform_random(d, n, seed)
    elif strategy == "petrushev_tensor":
        pts = _petrushev_tensor(d, n, seed)
    elif strategy == "band_with_poly_completion":
        pts = _band_with_poly_completion(d, n, k, lam, seed)
    else:
        raise ConfigurationError(f"unknown strategy {strategy!r}")
    return _make_pointset(pts, d, resolution, strategy, seed)


def thin_to_quasi_uniform(ps: PointSet, target_ratio: float) -> PointSet:
    """Greedy separation thinning: keep a point only if it is at least
    h/target_ratio away from every point already kept."""
    if target_ratio < 1.0:
        raise ContractError("target_ratio must be >= 1")
    cutoff = ps.h / target_ratio
    kept = [0]
    for i in range(1, ps.n):
        g = np.clip(ps.points[kept] @ ps.points[i], -1.0, 1.0)
        if float(np.arccos(np.max(g))) > cutoff:
            kept.append(i)
    pts = ps.points[kept]
    resolution = ps.h_resolution if ps.h_resolution > 0 else 0.01
    out = _make_pointset(pts, ps.d, resolution, ps.strategy + "+thinned", ps.seed)
    return replace(out, seed=ps.seed)


def pointset_to_json(ps: PointSet) -> str:
    coords = [[f"{x:.17g}" for x in p] for p in ps.points]
    payload = {
        "d": ps.d,
        "strategy": ps.strategy,
        "seed": ps.seed,
        "resolution": ps.h_resolution,
        "points": coords,
        "h": ps.h,
        "h_sep": ps.h_sep,
    }
    return json.dumps(payload)


def pointset_from_json(text: str) -> PointSet:
    obj = json.loads(text)
    pts = np.array([[float(x) for x in row] for row in obj["points"]])
    return PointSet(
        obj["d"],
        pts,
        obj["h"],
        obj["h_sep"],
        obj["resolution"],
        obj["strategy"],
        obj["seed"],
    )
