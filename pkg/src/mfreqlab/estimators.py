"""Operator-norm estimation on grid signals.

Linear operators get power iteration on T*T. Nonlinear ones (suprema,
variation compositions) only admit randomized lower bounds; every result
says which side of the true norm it bounds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .grid import GridSignal, GridSpec, Multiplier, apply_multiplier

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EstimatorConfig:
    method: str = "power_iteration"
    iterations: int = 200
    trials: int = 8
    seed: int = 0
    tol: float = 1e-10

    def __post_init__(self):
        if self.method not in ("power_iteration", "random_lower_bound"):
            raise ParameterError(f"unknown estimator {self.method!r}")
        if not self.tol > 0:
            raise ParameterError("tolerance must be positive")
        if self.trials < 1 or self.iterations < 1:
            raise ParameterError("trials and iterations must be >= 1")


@dataclass(frozen=True)
class NormEstimate:
    value: float
    converged: bool
    iterations: int
    bound: str  # 'estimate' for power iteration, 'lower' for random sampling


def multiplier_operator(m: Multiplier):
    """(op, adjoint) pair for m(D) acting on grid signals."""
    adj = Multiplier(m.spec, np.conj(m.values))
    return (lambda f: apply_multiplier(m, f)), (lambda f: apply_multiplier(adj, f))


def power_iteration_norm(op, adjoint, spec: GridSpec, cfg: EstimatorConfig = EstimatorConfig()) -> NormEstimate:
    """Largest singular value of a linear ``op`` via iteration on op* op."""
    f = GridSignal.random(spec, cfg.seed)
    f = f.scaled(1.0 / f.l2_norm())
    prev = None
    sigma = 0.0
    for it in range(1, cfg.iterations + 1):
        g = op(f)
        sigma = g.l2_norm()
        if sigma == 0.0:
            return NormEstimate(0.0, True, it, "estimate")
        h = adjoint(g)
        hn = h.l2_norm()
        if hn == 0.0:
            return NormEstimate(sigma, True, it, "estimate")
        f = h.scaled(1.0 / hn)
        if prev is not None and abs(sigma - prev) <= cfg.tol * sigma:
            return NormEstimate(sigma, True, it, "estimate")
        prev = sigma
    logger.warning("power iteration stopped at the cap (%d) before reaching tol %g", cfg.iterations, cfg.tol)
    return NormEstimate(sigma, False, cfg.iterations, "estimate")


def random_lower_bound(op, spec: GridSpec, cfg: EstimatorConfig = EstimatorConfig()) -> NormEstimate:
    """max over complex Gaussian inputs (seed + trial) of ||op f|| / ||f||."""
    best = 0.0
    for t in range(cfg.trials):
        f = GridSignal.random(spec, cfg.seed + t)
        best = max(best, op(f).l2_norm() / f.l2_norm())
    return NormEstimate(best, True, cfg.trials, "lower")


def estimate_norm(op, spec: GridSpec, cfg: EstimatorConfig, adjoint=None) -> NormEstimate:
    if cfg.method == "power_iteration":
        if adjoint is None:
            raise ParameterError("power iteration needs the adjoint")
        return power_iteration_norm(op, adjoint, spec, cfg)
    return random_lower_bound(op, spec, cfg)


def loglog_fit(x, y):
    """Least-squares slope/intercept of log y against log x, with RMS residual."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return float(coef[0]), float(coef[1]), float(math.sqrt(np.mean(resid**2)))


def log2_linear_fit(index, y):
    """Least-squares slope of log2 y against a linear index."""
    ix = np.asarray(index, float)
    ly = np.log2(np.asarray(y, float))
    A = np.vstack([ix, np.ones_like(ix)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return float(coef[0]), float(coef[1]), float(math.sqrt(np.mean(resid**2)))
