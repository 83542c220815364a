"""Composite Gauss-Legendre / Simpson quadrature with panel doubling."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConfigurationError, EvaluationError

__all__ = ["QuadratureSpec", "QuadResult", "DEFAULT_SPEC", "integrate", "composite"]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)
_SIMPSON_NODES = np.array([-1.0, 0.0, 1.0])
_SIMPSON_WEIGHTS = np.array([1.0, 4.0, 1.0]) / 3.0

_RULES = {
    "gauss5": (_GL_NODES, _GL_WEIGHTS),
    "simpson": (_SIMPSON_NODES, _SIMPSON_WEIGHTS),
}


@dataclass(frozen=True)
class QuadratureSpec:
    rule: str = "gauss5"
    panels: int = 8
    tol: float = 1e-12
    max_panels: int = 4096

    def __post_init__(self):
        if self.rule not in _RULES:
            raise ConfigurationError(f"unknown rule {self.rule!r}; choose from {sorted(_RULES)}")
        if int(self.panels) != self.panels or self.panels < 1:
            raise ConfigurationError(f"panels must be a positive integer, got {self.panels}")
        if int(self.max_panels) != self.max_panels or self.max_panels < self.panels:
            raise ConfigurationError(f"max_panels must be an integer >= panels, got {self.max_panels}")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise ConfigurationError(f"tol must be positive, got {self.tol}")


DEFAULT_SPEC = QuadratureSpec()


class QuadResult(NamedTuple):
    value: float
    error: float
    converged: bool
    panels: int


def composite(g: Callable, alpha: float, beta: float, panels: int, rule: str = "gauss5") -> float:
    """One composite-rule evaluation of the integral of ``g`` over ``panels`` equal panels.

    ``g`` is called once on the array of all quadrature nodes.  Panel sums
    are accumulated in ascending panel order with :func:`math.fsum`, so the
    result does not depend on how ``g`` was evaluated.
    """
    nodes, weights = _RULES[rule]
    edges = np.linspace(alpha, beta, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = mid[:, None] + half[:, None] * nodes[None, :]
    with np.errstate(all="ignore"):
        fx = np.broadcast_to(np.asarray(g(x.ravel()), dtype=float), (x.size,)).reshape(x.shape)
    bad = ~np.isfinite(fx)
    if bad.any():
        raise EvaluationError(f"non-finite integrand at x = {x[bad][0]!r}")
    per_panel = half * (fx @ weights)
    return math.fsum(per_panel)


def integrate(g: Callable, interval, spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """Integrate the vectorised callback ``g`` over ``interval`` = (alpha, beta).

    The panel count starts at ``spec.panels`` and doubles until two
    successive values differ by less than ``tol * max(1, |value|)`` or
    ``max_panels`` is exceeded, in which case ``converged`` is False and the
    finest value is still returned.
    """
    alpha, beta = float(interval[0]), float(interval[1])
    if not (math.isfinite(alpha) and math.isfinite(beta) and alpha < beta):
        raise ConfigurationError(f"need finite alpha < beta, got [{alpha}, {beta}]")
    panels = spec.panels
    prev = composite(g, alpha, beta, panels, spec.rule)
    while 2 * panels <= spec.max_panels:
        panels *= 2
        value = composite(g, alpha, beta, panels, spec.rule)
        err = abs(value - prev)
        if err < spec.tol * max(1.0, abs(value)):
            return QuadResult(value, err, True, panels)
        prev = value
    if panels == spec.panels:
        return QuadResult(prev, math.inf, False, panels)
    return QuadResult(value, err, False, panels)
