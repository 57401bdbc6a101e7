"""Experiment orchestration: rate sweeps, random-vs-deterministic
comparisons, slope fitting, and CSV/JSON persistence.

Configs are flat key=value text files; every emitted row carries a short
hash of the parsed config so result files are self-identifying.  Identical
configs produce byte-identical output (floats are written with repr).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import quadrature
from .activation import spectrum
from .errors import ConfigurationError, ContractError, DomainError
from .harmonics import reference_grid
from .models import (
    TargetFunction,
    coef_stat,
    constructive_fit,
    error_norms,
    least_squares_fit,
)
from .sphere import generate_points

__all__ = [
    "ExperimentConfig",
    "RateReport",
    "fit_slope",
    "parse_config",
    "config_hash",
    "get_target",
    "domain_grid",
    "run_rates",
    "run_randcmp",
]

MIN_SLOPE_ROWS = 4


def fit_slope(log_points) -> tuple[float, float]:
    """OLS slope and standard error for (log n, log err) pairs."""
    pts = np.asarray(log_points, dtype=float)
    if len(pts) < MIN_SLOPE_ROWS:
        raise ContractError(f"need at least {MIN_SLOPE_ROWS} points for a slope")
    if not np.all(np.isfinite(pts)):
        raise DomainError("slope fit requires finite log values")
    x, y = pts[:, 0], pts[:, 1]
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    return float(slope), float(math.sqrt(max(cov[0, 0], 0.0)))


def loglog_slope(ns, errs) -> tuple[float, float]:
    """fit_slope on raw (n, err) data; errors must be positive."""
    errs = np.asarray(errs, dtype=float)
    if np.any(errs <= 0.0):
        raise DomainError("nonpositive error value in slope data")
    return fit_slope(np.column_stack([np.log(ns), np.log(errs)]))


def parse_config(text: str) -> dict:
    """key=value lines; '#' starts a comment; values keep their raw form."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.replace(",", " ").split())


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated sweep description shared by rates / randcmp runs."""

    d: int
    k: int
    target: str
    strategy: str
    ns: tuple[int, ...]
    path: str = "ls"  # "ls" or "constructive"
    seeds: tuple[int, ...] = (0,)
    ridge: float = 0.0
    resolution: float = 0.01
    s: int = 1
    out_dir: str = "."
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, cfg: dict) -> "ExperimentConfig":
        try:
            return cls(
                d=int(cfg["d"]),
                k=int(cfg["k"]),
                target=cfg["target"],
                strategy=cfg["strategy"],
                ns=_parse_int_list(cfg["ns"]),
                path=cfg.get("path", "ls"),
                seeds=_parse_int_list(cfg.get("seeds", "0")),
                ridge=float(cfg.get("ridge", "0.0")),
                resolution=float(cfg.get("resolution", "0.01")),
                s=int(cfg.get("s", "1")),
                out_dir=cfg.get("out_dir", "."),
                raw=dict(cfg),
            )
        except KeyError as exc:
            raise ConfigurationError(f"missing config key: {exc.args[0]}") from exc
        except ValueError as exc:
            raise ConfigurationError(f"bad config value: {exc}") from exc

    def __post_init__(self):
        if self.path not in ("ls", "constructive"):
            raise ConfigurationError("path must be 'ls' or 'constructive'")
        if self.s not in (0, 1):
            raise ConfigurationError("s must be 0 or 1")
        if len(self.ns) == 0:
            raise ConfigurationError("ns must be nonempty")

    @property
    def hash(self) -> str:
        base = self.raw or {
            k: str(v) for k, v in asdict(self).items() if k != "raw"
        }
        return config_hash(base)


@dataclass(frozen=True)
class RateReport:
    """Sweep results plus the fitted log-log slope (NaN if < 4 clean rows)."""

    config_hash: str
    rows: tuple[dict, ...]
    fitted_slope: float
    slope_stderr: float
    theoretical_slope: float
    note: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "config_hash": self.config_hash,
                "fitted_slope": self.fitted_slope,
                "slope_stderr": self.slope_stderr,
                "theoretical_slope": self.theoretical_slope,
                "note": self.note,
                "rows": list(self.rows),
            }
        )


def get_target(name: str, d: int) -> TargetFunction:
    """Built-in targets by name."""
    if name == "smooth_even_circle":
        if d != 1:
            raise ConfigurationError("smooth_even_circle requires d=1")

        def g(eta):
            phi = np.arctan2(eta[..., 1], eta[..., 0])
            return np.exp(np.sin(2.0 * phi)) + np.cos(4.0 * phi)

        return TargetFunction(name, 1, g, on_sphere=True, parity=1)
    if name == "gaussian_bump":

        def f(x):
            return np.exp(-2.0 * np.sum(x**2, axis=-1))

        def fg(x):
            return (-4.0 * np.exp(-2.0 * np.sum(x**2, axis=-1)))[..., None] * x

        return TargetFunction(name, d, f, fg, regularity=math.inf)
    raise ConfigurationError(f"unknown target {name!r}")


def domain_grid(d: int, min_points: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature grid on the domain: uniform on [-1,1] for d=1, Gauss
    radial x equispaced angular on the unit disk for d=2.  Weights are
    normalized to sum to 1 (normalized volume measure)."""
    if d == 1:
        n = min_points
        x = -1.0 + 2.0 * (np.arange(n) + 0.5) / n
        return x[:, None], np.full(n, 1.0 / n)
    if d == 2:
        n_t = 512
        n_r = max(80, int(math.ceil(min_points / n_t)))
        r, wr = np.polynomial.legendre.leggauss(n_r)
        r = (r + 1.0) / 2.0
        wr = wr / 2.0
        t = 2.0 * math.pi * (np.arange(n_t) + 0.5) / n_t
        R, T = np.meshgrid(r, t, indexing="ij")
        pts = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
        w = np.repeat(wr * r, n_t) / n_t
        return pts, w / w.sum()
    raise ConfigurationError("domain grids implemented for d in {1,2}")


def theoretical_slope(d: int, k: int, s: int) -> float:
    """Rate exponent -(r - s)/d at the coefficient-bound regularity
    r = (d + 2k + 1)/2."""
    r = (d + 2 * k + 1) / 2.0
    return -(r - s) / d


def _rate_row_constructive(cfg: ExperimentConfig, target, n: int) -> dict:
    ps = generate_points(
        cfg.d, n, cfg.strategy, seed=cfg.seeds[0], resolution=cfg.resolution
    )
    rule = quadrature.build_rule(ps, n - 1 if cfg.d == 1 else quadrature.default_degree(ps))
    spec = spectrum(cfg.d, cfg.k, rule.J + 4)
    grid = reference_grid(cfg.d, max(2 * rule.J + 8, 1024 if cfg.d == 1 else 64))
    model = constructive_fit(target, rule, spec, grid)
    diff = model(grid.nodes) - target(grid.nodes)
    l2 = math.sqrt(max(float(np.dot(grid.weights, diff**2)), 0.0))
    return {
        "n": n,
        "h": ps.h,
        "error_l2": l2,
        "error_h1": float("nan"),
        "sqrtn_a_norm": coef_stat(model)[1],
        "error_code": "",
    }


def _rate_row_ls(cfg: ExperimentConfig, target, n: int, seed: int, grid) -> dict:
    pts, w = grid
    ps = generate_points(cfg.d, n, cfg.strategy, seed=seed, resolution=cfg.resolution)
    model = least_squares_fit(target, ps, pts, w, k=cfg.k, ridge=cfg.ridge)
    l2, h1 = error_norms(model, target, pts, w, s=cfg.s)
    return {
        "n": n,
        "h": ps.h,
        "error_l2": l2,
        "error_h1": h1,
        "sqrtn_a_norm": coef_stat(model)[1],
        "error_code": "",
    }


RATE_COLUMNS = ("n", "h", "error_l2", "error_h1", "sqrtn_a_norm", "error_code")


def _write_rate_csv(path: Path, chash: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write("config_hash," + ",".join(RATE_COLUMNS) + "\n")
        for row in rows:
            cells = [chash]
            for col in RATE_COLUMNS:
                v = row[col]
                cells.append(repr(v) if isinstance(v, float) else str(v))
            fh.write(",".join(cells) + "\n")


def run_rates(cfg: ExperimentConfig, write: bool = True) -> RateReport:
    """One error-vs-n sweep; failed cells become error rows, not aborts."""
    target = get_target(cfg.target, cfg.d)
    grid = None if cfg.path == "constructive" else domain_grid(cfg.d, 4096 if cfg.d == 1 else 64 * max(cfg.ns))
    rows = []
    for n in sorted(cfg.ns):
        try:
            if cfg.path == "constructive":
                rows.append(_rate_row_constructive(cfg, target, n))
            else:
                rows.append(_rate_row_ls(cfg, target, n, cfg.seeds[0], grid))
        except Exception as exc:  # error rows keep the sweep alive
            rows.append(
                {
                    "n": n,
                    "h": float("nan"),
                    "error_l2": float("nan"),
                    "error_h1": float("nan"),
                    "sqrtn_a_norm": float("nan"),
                    "error_code": type(exc).__name__,
                }
            )
    clean = [r for r in rows if r["error_code"] == "" and r["error_l2"] > 0.0]
    note = ""
    if len(clean) >= MIN_SLOPE_ROWS:
        slope, stderr = loglog_slope(
            [r["n"] for r in clean], [r["error_l2"] for r in clean]
        )
    else:
        slope, stderr, note = float("nan"), float("nan"), "insufficient data"
    report = RateReport(
        cfg.hash,
        tuple(rows),
        slope,
        stderr,
        theoretical_slope(cfg.d, cfg.k, 0),
        note,
    )
    if write:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_rate_csv(out / f"rates_{cfg.hash}.csv", cfg.hash, rows)
        (out / f"rates_{cfg.hash}.json").write_text(report.to_json())
    return report


def run_randcmp(cfg: ExperimentConfig, write: bool = True) -> dict:
    """Deterministic vs random-direction least squares at each n.

    For every n the deterministic strategy from the config is compared
    with uniform_random draws over all config seeds; the summary records
    the random-error median and quartiles plus random mesh norms.
    """
    if len(cfg.seeds) < 10:
        raise ConfigurationError("randcmp needs at least 10 seeds")
    target = get_target(cfg.target, cfg.d)
    grid = domain_grid(cfg.d, 4096 if cfg.d == 1 else 64 * max(cfg.ns))
    rows = []
    for n in sorted(cfg.ns):
        det = _rate_row_ls(cfg, target, n, cfg.seeds[0], grid)
        rand_errs, rand_h = [], []
        for seed in cfg.seeds:
            pts, w = grid
            ps = generate_points(
                cfg.d, n, "uniform_random", seed=seed, resolution=cfg.resolution
            )
            model = least_squares_fit(target, ps, pts, w, k=cfg.k, ridge=cfg.ridge)
            l2, _ = error_norms(model, target, pts, w, s=0)
            rand_errs.append(l2)
            rand_h.append(ps.h)
        q1, q2, q3 = np.percentile(rand_errs, [25, 50, 75])
        rows.append(
            {
                "n": n,
                "det_error": det["error_l2"],
                "det_h": det["h"],
                "rand_q1": float(q1),
                "rand_median": float(q2),
                "rand_q3": float(q3),
                "rand_h_median": float(np.median(rand_h)),
            }
        )
    summary = {"config_hash": cfg.hash, "rows": rows}
    if write:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        cols = list(rows[0].keys())
        with open(out / f"randcmp_{cfg.hash}.csv", "w") as fh:
            fh.write("config_hash," + ",".join(cols) + "\n")
            for row in rows:
                cells = [cfg.hash] + [
                    repr(v) if isinstance(v, float) else str(v) for v in row.values()
                ]
                fh.write(",".join(cells) + "\n")
    return summary
