"""Admissible variations phi with phi, phi', phi'' vanishing at both endpoints.

Two kinds are provided: the closed-form bump ``lam * ((x - a)(x - b))**n``
and a sampled variation interpolated from grid values (for example read
from a CSV file).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import AdmissibilityError, ConfigurationError, DomainError

__all__ = [
    "Interval",
    "PolyBump",
    "SampledTestFunction",
    "TestFunction",
    "BoundaryReport",
    "poly_bump",
    "sampled",
    "eval_phi",
    "boundary_check",
    "load_sampled_phi",
    "read_three_column_csv",
    "MAX_N",
    "BOUNDARY_TOL",
]

MAX_N = 12
BOUNDARY_TOL = 1e-12


class Interval(NamedTuple):
    alpha: float
    beta: float

    @classmethod
    def make(cls, alpha, beta) -> "Interval":
        alpha, beta = float(alpha), float(beta)
        if not (math.isfinite(alpha) and math.isfinite(beta)):
            raise ConfigurationError(f"interval endpoints must be finite, got [{alpha}, {beta}]")
        if not alpha < beta:
            raise ConfigurationError(f"need alpha < beta, got [{alpha}, {beta}]")
        return cls(alpha, beta)

    @property
    def length(self) -> float:
        return self.beta - self.alpha

    def contains(self, x, slack: float = 0.0) -> bool:
        x = np.asarray(x)
        pad = slack * max(1.0, abs(self.alpha), abs(self.beta))
        return bool(np.all((x >= self.alpha - pad) & (x <= self.beta + pad)))


@dataclass(frozen=True)
class PolyBump:
    """phi(x) = lam * ((x - alpha)(x - beta))**n with closed-form derivatives."""

    interval: Interval
    lam: float
    n: int

    kind = "poly_bump"

    def __call__(self, x):
        a, b = self.interval
        x = np.asarray(x, dtype=float)
        u = (x - a) * (x - b)
        du = 2.0 * x - a - b
        n, lam = self.n, self.lam
        phi = lam * u**n
        phi1 = lam * n * u ** (n - 1) * du
        # d2/dx2 u^n = n(n-1) u^(n-2) u'^2 + 2 n u^(n-1), since u'' = 2
        phi2 = lam * n * ((n - 1) * u ** (n - 2) * du**2 + 2.0 * u ** (n - 1))
        return phi, phi1, phi2

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class SampledTestFunction:
    """Variation given on a uniform grid by values of phi and phi'.

    phi is a cubic Hermite interpolant of (phi, phi'); phi' and phi'' come
    from a second Hermite interpolant of (phi', phi''), where phi'' at the
    nodes is either supplied or estimated by second-order differences of phi'.
    """

    interval: Interval
    x: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    phi_double_prime: np.ndarray
    _spl0: CubicHermiteSpline = field(repr=False)
    _spl1: CubicHermiteSpline = field(repr=False)

    kind = "sampled"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self._spl0(x), self._spl1(x), self._spl1(x, 1)

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.phi) or np.any(self.phi_prime) or np.any(self.phi_double_prime))


TestFunction = Union[PolyBump, SampledTestFunction]


def poly_bump(interval, lam: float = 1.0, n: int = 3, *, allow_large_n: bool = False) -> PolyBump:
    """The polynomial bump lam * ((x - alpha)(x - beta))**n.

    n must be an integer >= 3: for n <= 2 some of phi, phi', phi'' fails to
    vanish at the endpoints.  n is capped at :data:`MAX_N` unless
    ``allow_large_n`` is set, because u**n underflows/cancels on wide intervals.
    """
    interval = Interval.make(*interval)
    lam = float(lam)
    if not (math.isfinite(lam) and lam > 0):
        raise AdmissibilityError(f"lambda must be positive and finite, got {lam}")
    if isinstance(n, float) and n.is_integer():
        n = int(n)
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise AdmissibilityError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 3:
        raise AdmissibilityError(
            f"n = {n} is not admissible: phi, phi', phi'' must all vanish at both "
            "endpoints, which requires n >= 3 (n in {0, 1, 2} excluded)"
        )
    if n > MAX_N and not allow_large_n:
        raise ConfigurationError(f"n = {n} exceeds the cap {MAX_N}; pass allow_large_n=True to override")
    return PolyBump(interval, lam, n)


def _check_uniform(x: np.ndarray) -> None:
    if x.ndim != 1 or x.size < 4:
        raise ConfigurationError("sampled data needs at least 4 grid nodes")
    dx = np.diff(x)
    if np.any(dx <= 0):
        raise ConfigurationError("grid nodes must be strictly increasing")
    if np.max(np.abs(dx - dx.mean())) > 1e-9 * dx.mean():
        raise ConfigurationError("grid nodes must be uniformly spaced")


def sampled(x, phi, phi_prime, phi_double_prime=None) -> SampledTestFunction:
    """Build a sampled variation from grid values; no admissibility check is made.

    Use :func:`boundary_check` to test the endpoint conditions.
    """
    x, phi, phi_prime = (np.array(a, dtype=float) for a in (x, phi, phi_prime))
    _check_uniform(x)
    if not (phi.shape == phi_prime.shape == x.shape):
        raise ConfigurationError("x, phi and phi' must have the same length")
    if phi_double_prime is None:
        phi_double_prime = np.gradient(phi_prime, x, edge_order=2)
    phi_double_prime = np.array(phi_double_prime, dtype=float)
    if phi_double_prime.shape != x.shape:
        raise ConfigurationError("phi'' must have the same length as x")
    for name, arr in (("x", x), ("phi", phi), ("phi'", phi_prime), ("phi''", phi_double_prime)):
        if not np.all(np.isfinite(arr)):
            raise ConfigurationError(f"sampled {name} contains non-finite values")
    interval = Interval.make(x[0], x[-1])
    return SampledTestFunction(
        interval,
        x,
        phi,
        phi_prime,
        phi_double_prime,
        CubicHermiteSpline(x, phi, phi_prime, extrapolate=False),
        CubicHermiteSpline(x, phi_prime, phi_double_prime, extrapolate=False),
    )


def eval_phi(tf: TestFunction, x):
    """Return (phi, phi', phi'') at ``x``, which must lie in the interval."""
    if not tf.interval.contains(x):
        raise DomainError(f"x outside [{tf.interval.alpha}, {tf.interval.beta}]")
    phi, d1, d2 = tf(x)
    if np.ndim(phi) == 0:
        return float(phi), float(d1), float(d2)
    return phi, d1, d2


class BoundaryReport(NamedTuple):
    """|phi^(k)| at alpha and beta for k = 0, 1, 2, and the overall verdict."""

    left: tuple
    right: tuple
    passed: bool
    tol: float


def boundary_check(tf: TestFunction, tol: float = BOUNDARY_TOL) -> BoundaryReport:
    if isinstance(tf, SampledTestFunction):
        left = (tf.phi[0], tf.phi_prime[0], tf.phi_double_prime[0])
        right = (tf.phi[-1], tf.phi_prime[-1], tf.phi_double_prime[-1])
    else:
        left = tf(tf.interval.alpha)
        right = tf(tf.interval.beta)
    left = tuple(abs(float(v)) for v in left)
    right = tuple(abs(float(v)) for v in right)
    return BoundaryReport(left, right, max(left + right) <= tol, tol)


def read_three_column_csv(path) -> tuple:
    """Read a headed CSV of at least three numeric columns; returns (header, columns)."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ConfigurationError(f"{path}: expected a header and data rows")
    header = [h.strip() for h in rows[0][1]]
    if len(header) not in (3, 4):
        raise ConfigurationError(f"{path}: expected 3 columns (optionally a 4th), got {len(header)}")
    data = []
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise ConfigurationError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
        try:
            data.append([float(c) for c in row])
        except ValueError:
            raise ConfigurationError(f"{path}:{lineno}: non-numeric entry in {row}") from None
    return header, np.array(data).T


def load_sampled_phi(path) -> SampledTestFunction:
    """Load a variation from CSV columns ``x, phi, phi_prime`` (header required).

    An optional fourth column supplies phi'' at the nodes; otherwise it is
    estimated from phi'.
    """
    _, cols = read_three_column_csv(path)
    return sampled(*cols)
