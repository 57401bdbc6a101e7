"""Positive quadrature rules on scattered sphere points.

Given directions on S^d, solve for nonnegative weights tau_j matching the
harmonic moments up to a target degree D (constant integrates to 1, all
higher harmonics to 0 under the normalized measure).  The solver is
nonnegative least squares, preceded by a cheap minimum-norm least-squares
attempt that is accepted whenever it happens to be nonnegative (it always
is for symmetric configurations such as equispaced circles).  If the
residual tolerance cannot be met at D, the degree is lowered by 2 and the
solve retried, so a rule with the largest feasible exact degree is always
returned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .errors import ContractError, NumericalError
from .harmonics import harmonic_block
from .sphere import PointSet, pointset_from_json, pointset_to_json

__all__ = ["QuadratureRule", "build_rule", "integrate", "rule_to_json", "rule_from_json"]

DEFAULT_C1 = 0.5


@dataclass(frozen=True)
class QuadratureRule:
    """Nonnegative weights exact on spherical polynomials up to degree D.

    J = D // 2 is the largest degree usable in product (projection)
    integrands.  residual is the max absolute moment error achieved.
    """

    ps: PointSet
    weights: np.ndarray = field(repr=False)
    exact_degree: int
    residual: float
    tol: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.ps.n,):
            raise ContractError("weight count must match point count")
        if np.any(w < 0.0):
            raise ContractError("weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > 1e-10:
            raise ContractError("weights must sum to 1")
        object.__setattr__(self, "weights", w)

    @property
    def J(self) -> int:
        return self.exact_degree // 2

    @property
    def c_tau(self) -> float:
        """Recorded constant max_j tau_j / h^d."""
        return float(np.max(self.weights)) / self.ps.h**self.ps.d


def _moment_system(ps: PointSet, D: int):
    rows = [harmonic_block(ps.d, m, ps.points) for m in range(D + 1)]
    A = np.vstack(rows)
    b = np.zeros(len(A))
    b[0] = 1.0
    return A, b


def default_degree(ps: PointSet, c1: float = DEFAULT_C1) -> int:
    """Default target degree D = 2*floor(c1 / h)."""
    return 2 * int(math.floor(c1 / ps.h))


def build_rule(ps: PointSet, D_target: int, tol: float = 1e-8) -> QuadratureRule:
    """Largest-degree nonnegative rule with moment residual <= tol.

    Starts at D_target and decrements by 2 until feasible; raises
    NumericalError only if even mass matching (D=0) fails.
    """
    if D_target < 0:
        raise ContractError("D_target must be >= 0")
    D = D_target
    while D >= 0:
        A, b = _moment_system(ps, D)
        # fast path: min-norm least squares, accepted if already nonnegative
        w, *_ = np.linalg.lstsq(A, b, rcond=None)
        if np.min(w) < -1e-14 or np.max(np.abs(A @ w - b)) > tol:
            w, _ = nnls(A, b, maxiter=10 * max(A.shape))
        w = np.maximum(w, 0.0)
        res = float(np.max(np.abs(A @ w - b)))
        if res <= tol and w.sum() > 0.0:
            w = w / w.sum()
            res = float(np.max(np.abs(A @ w - b)))
            return QuadratureRule(ps, w, D, res, tol)
        D -= 2
    raise NumericalError("no feasible nonnegative rule at any degree >= 0")


def integrate(rule: QuadratureRule, values: np.ndarray) -> float:
    """Sum tau_j v_j for samples v_j at the rule points."""
    values = np.asarray(values, dtype=float)
    if values.shape != rule.weights.shape:
        raise ContractError("sample count must match rule size")
    return float(np.dot(rule.weights, values))


def rule_to_json(rule: QuadratureRule) -> str:
    ps_json = pointset_to_json(rule.ps)
    payload = {
        "D": rule.exact_degree,
        "J": rule.J,
        "tol": rule.tol,
        "residual": rule.residual,
        "weights": [f"{w:.17g}" for w in rule.weights],
        "pointset_hash": f"{hash(ps_json) & 0xFFFFFFFF:08x}",
        "pointset": json.loads(ps_json),
    }
    return json.dumps(payload)


def rule_from_json(text: str) -> QuadratureRule:
    obj = json.loads(text)
    ps = pointset_from_json(json.dumps(obj["pointset"]))
    w = np.array([float(x) for x in obj["weights"]])
    return QuadratureRule(ps, w, obj["D"], obj["residual"], obj["tol"])
