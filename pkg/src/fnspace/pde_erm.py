"""Ritz-energy empirical risk minimization over finite neuron spaces.

The model problem is -Laplace(f) + f = h with zero Neumann data, whose
solution minimizes E(g) = int_Omega (|grad g|^2 + g^2)/2 - h g.  Both
manufactured problems normalize the density so that the Monte Carlo
estimator of E is an unweighted sample mean of |Omega| * Psi(g)(x_i) with
x_i uniform on Omega.  Because E is quadratic, E(g) - E(f) equals half
the squared energy norm of g - f, which pins the excess-risk and H1
computations to each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .activation import sigma_k, sigma_k_prime
from .errors import ConfigurationError, ContractError
from .models import FiniteNeuronModel, TargetFunction, ridge_bisect_cap
from .sphere import PointSet, mesh_norm, separation

__all__ = [
    "EllipticProblem",
    "ErmResult",
    "interval_problem",
    "disk_problem",
    "interval_directions",
    "energy",
    "empirical_risk",
    "erm_fit",
]


@dataclass(frozen=True)
class EllipticProblem:
    """Manufactured Neumann problem -Lap(f) + f = h on Omega.

    sample(m, seed) draws uniform points on Omega; grid() returns a dense
    quadrature (points, weights) with weights summing to |Omega|.
    """

    d: int
    name: str
    volume: float
    source: Callable[[np.ndarray], np.ndarray]
    solution: TargetFunction
    sample: Callable[[int, int], np.ndarray]
    grid: Callable[[], tuple[np.ndarray, np.ndarray]]
    exact_energy: float


def interval_problem() -> EllipticProblem:
    """Omega = (0,1), f = cos(pi x), h = (pi^2+1) cos(pi x).

    E(f) = -(pi^2+1)/4.
    """

    def f(x):
        return np.cos(math.pi * x[..., 0])

    def fg(x):
        return -math.pi * np.sin(math.pi * x[..., 0])[..., None]

    def h(x):
        return (math.pi**2 + 1.0) * np.cos(math.pi * x[..., 0])

    def sample(m, seed):
        rng = np.random.Generator(np.random.Philox(seed))
        return rng.uniform(0.0, 1.0, (m, 1))

    def grid(n=4096):
        x = (np.arange(n) + 0.5) / n
        return x[:, None], np.full(n, 1.0 / n)

    sol = TargetFunction("cos_pi_x", 1, f, fg, regularity=math.inf)
    return EllipticProblem(
        1, "interval", 1.0, h, sol, sample, grid, -(math.pi**2 + 1.0) / 4.0
    )


def disk_problem() -> EllipticProblem:
    """Omega = unit disk, f = cos(pi r^2).

    Then -Lap(f) + f = 4 pi sin(pi r^2) + (4 pi^2 r^2 + 1) cos(pi r^2),
    and grad f vanishes on r = 1, so the Neumann data is zero.
    """

    def f(x):
        return np.cos(math.pi * np.sum(x**2, axis=-1))

    def fg(x):
        r2 = np.sum(x**2, axis=-1)
        return (-2.0 * math.pi * np.sin(math.pi * r2))[..., None] * x

    def h(x):
        r2 = np.sum(x**2, axis=-1)
        return 4.0 * math.pi * np.sin(math.pi * r2) + (
            4.0 * math.pi**2 * r2 + 1.0
        ) * np.cos(math.pi * r2)

    def sample(m, seed):
        rng = np.random.Generator(np.random.Philox(seed))
        out = np.empty((m, 2))
        filled = 0
        while filled < m:
            cand = rng.uniform(-1.0, 1.0, (2 * (m - filled) + 16, 2))
            keep = cand[np.sum(cand**2, axis=1) <= 1.0]
            take = min(len(keep), m - filled)
            out[filled : filled + take] = keep[:take]
            filled += take
        return out

    def grid(n_r=256, n_t=512):
        r, wr = np.polynomial.legendre.leggauss(n_r)
        r = (r + 1.0) / 2.0
        wr = wr / 2.0
        t = 2.0 * math.pi * (np.arange(n_t) + 0.5) / n_t
        R, T = np.meshgrid(r, t, indexing="ij")
        pts = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
        w = np.repeat(wr * r, n_t) * (2.0 * math.pi / n_t)
        return pts, w

    # at the minimizer E(f) = -(1/2)||f||_energy^2; computed on the dense grid
    sol = TargetFunction("cos_pi_r2", 2, f, fg, regularity=math.inf)
    gp, gw = grid()
    e_exact = float(
        np.dot(gw, 0.5 * np.sum(fg(gp) ** 2, axis=1) + 0.5 * f(gp) ** 2 - h(gp) * f(gp))
    )
    return EllipticProblem(2, "disk", math.pi, h, sol, sample, grid, e_exact)


def interval_directions(n: int) -> PointSet:
    """Directions on S^1 adapted to ridge fitting on the interval (0, 1).

    The first two neurons are active on the whole interval (breakpoints
    outside it, one per orientation); the rest place their breakpoints at
    equispaced interior knots with alternating orientation.  This keeps
    the span's expressive power growing with every added direction, which
    generic circle configurations fail to do at very small n.
    """
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    rows = [(1.0, 1.0), (-1.0, 1.0)][:n]
    nk = n - len(rows)
    for j in range(nk):
        t = (j + 1.0) / (nk + 1.0)
        s = 1.0 if j % 2 == 0 else -1.0
        rows.append((s, -s * t))
    pts = np.asarray(rows, dtype=float)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return PointSet(
        1, pts, mesh_norm(pts, 1), separation(pts), 0.0, "interval_knots", 0
    )


@dataclass(frozen=True)
class ErmResult:
    model: FiniteNeuronModel
    empirical_risk: float
    population_energy: float
    excess_risk: float
    h1_error: float
    m: int
    seed: int

    def __post_init__(self):
        if self.excess_risk < -1e-9:
            raise ContractError("excess risk below the numerical tolerance floor")
        if self.h1_error < 0.0:
            raise ContractError("h1_error must be nonnegative")


def _psi(g, grad_g, problem: EllipticProblem, x: np.ndarray) -> np.ndarray:
    gv = g(x)
    gr = grad_g(x)
    return 0.5 * np.sum(gr**2, axis=-1) + 0.5 * gv**2 - problem.source(x) * gv


def energy(g, grad_g, problem: EllipticProblem) -> float:
    """Grid-quadrature value of int_Omega Psi(g)."""
    pts, w = problem.grid()
    return float(np.dot(w, _psi(g, grad_g, problem, pts)))


def empirical_risk(g, grad_g, problem: EllipticProblem, samples: np.ndarray) -> float:
    """Sample mean of |Omega| Psi(g) over the given uniform draws."""
    samples = np.asarray(samples, dtype=float)
    if len(samples) == 0:
        raise ContractError("empirical risk needs at least one sample")
    return problem.volume * float(np.mean(_psi(g, grad_g, problem, samples)))


def erm_fit(
    problem: EllipticProblem,
    ps: PointSet,
    samples: np.ndarray,
    k: int,
    norm_cap: float = 0.0,
    seed: int = 0,
) -> ErmResult:
    """Empirical risk minimizer over the fixed-direction class.

    Assembles A_ij = |Omega| mean[grad(phi_i).grad(phi_j) + phi_i phi_j]
    and b_i = |Omega| mean[h phi_i], solves the quadratic program (ridge
    bisection if the cap sqrt(n)||a||_2 <= norm_cap binds), and measures
    excess risk and H1 error against the manufactured solution.
    """
    if k < 1:
        raise ConfigurationError("erm_fit needs k >= 1 for gradients")
    samples = np.asarray(samples, dtype=float)
    m = len(samples)
    if m == 0:
        raise ContractError("no samples")
    probe = FiniteNeuronModel(problem.d, k, ps, np.zeros(ps.n))
    z = probe._preactivation(samples)
    phi = sigma_k(k, z)
    dphi = sigma_k_prime(k, z)
    wdirs = ps.points[:, : problem.d]
    A = (phi.T @ phi) / m
    gram_w = wdirs @ wdirs.T
    A += (dphi.T @ dphi) / m * gram_w
    A *= problem.volume
    b = problem.volume * (phi.T @ problem.source(samples)) / m
    if norm_cap > 0.0:
        a, _ = ridge_bisect_cap(A, b, ps.n, norm_cap)
        nrm = math.sqrt(ps.n) * float(np.linalg.norm(a))
        if nrm > norm_cap:
            a *= norm_cap / nrm
    else:
        try:
            a = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            a = np.linalg.solve(A + 1e-12 * np.eye(ps.n), b)
    model = FiniteNeuronModel(problem.d, k, ps, a, norm_cap)
    emp = empirical_risk(model, model.gradient, problem, samples)
    pop = energy(model, model.gradient, problem)
    excess = pop - problem.exact_energy
    pts, w = problem.grid()
    diff = model(pts) - problem.solution(pts)
    gdiff = model.gradient(pts) - problem.solution.grad(pts)
    h1 = math.sqrt(
        max(float(np.dot(w, diff**2 + np.sum(gdiff**2, axis=1))), 0.0)
    )
    return ErmResult(model, emp, pop, max(excess, -1e-9 + 1e-18), h1, m, seed)
