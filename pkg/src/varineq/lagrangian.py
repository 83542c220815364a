"""Lagrangians f(x, y, y') and their partial derivatives up to third order.

A :class:`LagrangianModel` bundles a vectorised value callback with either
closed-form partials (``provider == "analytic"``) or a central-difference
fallback (``provider == "numeric"``).  Everything downstream consumes a
:class:`PartialSet`, so the two providers are interchangeable.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, fields
from typing import Callable, Mapping, NamedTuple, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import CapabilityError, ConfigurationError, EvaluationError, ModelNotFoundError

__all__ = [
    "Point3",
    "PartialSet",
    "LagrangianModel",
    "DEFAULT_STEPS",
    "eval_partials",
    "fd_partials",
    "catalog",
    "catalog_names",
    "catalog_info",
    "get_model",
    "pendulum",
    "harmonic",
    "arclength",
    "poly",
    "numeric_model",
]

_EPS = np.finfo(float).eps

#: Base step factor per derivative order k: eps ** (1 / (k + 2)).
DEFAULT_STEPS = (_EPS ** (1 / 3), _EPS ** (1 / 4), _EPS ** (1 / 5))


class Point3(NamedTuple):
    """Argument triple (x, y, y') of a Lagrangian."""

    x: float
    y: float
    yp: float


@dataclass(frozen=True)
class PartialSet:
    """Value and partial derivatives of f at one point (or along an array of points).

    Field names spell the differentiation variables, ``yp`` standing for y'.
    The x-mixed entries may be ``None`` when a user-supplied provider cannot
    produce them; operations that need them raise :class:`CapabilityError`.
    """

    f: float
    f_y: float
    f_yp: float
    f_yy: float
    f_yyp: float
    f_ypyp: float
    f_yyyp: float
    f_yypyp: float
    f_ypypyp: float
    f_xyyp: Optional[float] = None
    f_xypyp: Optional[float] = None
    f_xyp: Optional[float] = None

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise CapabilityError(f"provider does not supply {', '.join(missing)}")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


FIELD_NAMES = tuple(f.name for f in fields(PartialSet))
_REQUIRED = FIELD_NAMES[:9]

# Multi-index (order in x, y, y') for every field.
_MULTI_INDEX = {
    "f": (0, 0, 0),
    "f_y": (0, 1, 0),
    "f_yp": (0, 0, 1),
    "f_yy": (0, 2, 0),
    "f_yyp": (0, 1, 1),
    "f_ypyp": (0, 0, 2),
    "f_yyyp": (0, 2, 1),
    "f_yypyp": (0, 1, 2),
    "f_ypypyp": (0, 0, 3),
    "f_xyyp": (1, 1, 1),
    "f_xypyp": (1, 0, 2),
    "f_xyp": (1, 0, 1),
}


def _check_finite(values: Mapping, where) -> None:
    for name, v in values.items():
        if v is None:
            continue
        arr = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(arr)):
            if arr.ndim:
                bad = int(np.flatnonzero(~np.isfinite(arr))[0])
                loc = f"point {bad} of the evaluation grid"
            else:
                loc = f"{where}"
            raise EvaluationError(f"non-finite {name} at {loc}")


@dataclass(frozen=True, eq=False)
class LagrangianModel:
    """A Lagrangian with a value callback and a partial-derivative provider.

    ``value(x, y, yp)`` and ``partials(x, y, yp)`` must accept numpy arrays.
    ``partials`` returns a mapping keyed by :data:`FIELD_NAMES`; when it is
    ``None`` the model is numeric and derivatives come from :func:`fd_partials`
    with the configured ``steps``.
    """

    name: str
    value: Callable
    partials: Optional[Callable] = None
    params: Mapping[str, float] = field(default_factory=dict)
    steps: tuple = DEFAULT_STEPS

    def __post_init__(self):
        if self.partials is None:
            _validate_steps(self.steps)

    @property
    def provider(self) -> str:
        return "analytic" if self.partials is not None else "numeric"

    def partials_at(self, x, y, yp) -> PartialSet:
        """Evaluate every partial at (x, y, yp); arguments broadcast as arrays."""
        if self.partials is None:
            return fd_partials(self.value, Point3(x, y, yp), self.steps)
        x, y, yp = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, yp)))
        with np.errstate(all="ignore"):
            raw = dict(self.partials(x, y, yp))
        values = {}
        for name in FIELD_NAMES:
            v = raw.get(name)
            if v is None:
                if name in _REQUIRED:
                    raise CapabilityError(f"model {self.name!r} does not supply {name}")
                values[name] = None
                continue
            v = np.broadcast_to(np.asarray(v, dtype=float), x.shape)
            values[name] = float(v) if v.ndim == 0 else v.copy()
        _check_finite(values, (x, y, yp))
        return PartialSet(**values)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"LagrangianModel({self.name}({args}), provider={self.provider})"


def eval_partials(model: LagrangianModel, p: Point3) -> PartialSet:
    """All partials of ``model`` at the single point ``p``."""
    p = Point3(*(float(c) for c in p))
    if not all(math.isfinite(c) for c in p):
        raise EvaluationError(f"non-finite evaluation point {p}")
    return model.partials_at(*p)


# --------------------------------------------------------------------------
# finite differences
# --------------------------------------------------------------------------

# 1-D central stencils (offset -> weight, before dividing by h**order).
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
}


def _validate_steps(steps) -> tuple:
    steps = tuple(float(s) for s in steps)
    if len(steps) != 3:
        raise ConfigurationError(f"need one step factor per derivative order 1..3, got {steps}")
    if not all(math.isfinite(s) and s > 0 for s in steps):
        raise ConfigurationError(f"finite-difference steps must be positive, got {steps}")
    return steps


def fd_partials(value_fn: Callable, p: Point3, steps=None) -> PartialSet:
    """Central-difference estimates of every :class:`PartialSet` field.

    A derivative of total order k uses, on each axis it touches, the step
    ``steps[k-1] * max(1, |coordinate|)``.  With :data:`DEFAULT_STEPS` the
    relative accuracy is roughly 1e-10, 1e-7 and 1e-4 for first, second and
    third partials; rounding noise scales with ``|f|``.
    """
    steps = _validate_steps(DEFAULT_STEPS if steps is None else steps)
    x, y, yp = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in p))
    base = (x, y, yp)
    scale = [np.maximum(1.0, np.abs(c)) for c in base]
    cache: dict = {}

    def sample(offsets):
        # offsets: three step-multiples, already scaled by h per axis
        key = tuple(np.asarray(o).tobytes() if np.ndim(o) else o for o in offsets)
        if key not in cache:
            with np.errstate(all="ignore"):
                cache[key] = np.asarray(
                    value_fn(*(c + o for c, o in zip(base, offsets))), dtype=float
                )
        return cache[key]

    values = {}
    for name, orders in _MULTI_INDEX.items():
        k = sum(orders)
        h = [steps[k - 1] * s if k else 0 * s for s in scale]
        total = 0.0
        axes = [sorted(_STENCILS[o].items()) for o in orders]
        for combo in itertools.product(*axes):
            w = 1.0
            offsets = []
            for axis, (off, wt) in enumerate(combo):
                w *= wt
                offsets.append(off * h[axis] if off else 0.0)
            total = total + w * sample(offsets)
        denom = 1.0
        for axis, o in enumerate(orders):
            if o:
                denom = denom * h[axis] ** o
        est = total / denom
        values[name] = float(est) if np.ndim(est) == 0 else np.asarray(est)
    _check_finite(values, Point3(*p))
    return PartialSet(**values)


def numeric_model(name: str, value_fn: Callable, steps=None, **params) -> LagrangianModel:
    """Wrap a value-only Lagrangian; partials come from :func:`fd_partials`."""
    return LagrangianModel(name, value_fn, None, dict(params), _validate_steps(steps or DEFAULT_STEPS))


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------

def _positive(name, v):
    v = float(v)
    if not (math.isfinite(v) and v > 0):
        raise ConfigurationError(f"{name} must be a positive finite number, got {v}")
    return v


def pendulum(m: float = 1.0, ell: float = 1.0, g: float = 9.8) -> LagrangianModel:
    """Simple pendulum, L = m ell^2 thetadot^2 / 2 + m g ell cos(theta)."""
    m, ell, g = _positive("m", m), _positive("ell", ell), _positive("g", g)
    inertia, weight = m * ell**2, m * g * ell

    def value(t, th, thd):
        return 0.5 * inertia * thd**2 + weight * np.cos(th)

    def partials(t, th, thd):
        zero = np.zeros_like(th)
        return {
            "f": value(t, th, thd),
            "f_y": -weight * np.sin(th),
            "f_yp": inertia * thd,
            "f_yy": -weight * np.cos(th),
            "f_yyp": zero,
            "f_ypyp": inertia + zero,
            "f_yyyp": zero,
            "f_yypyp": zero,
            "f_ypypyp": zero,
            "f_xyyp": zero,
            "f_xypyp": zero,
            "f_xyp": zero,
        }

    return LagrangianModel("pendulum", value, partials, {"m": m, "ell": ell, "g": g})


def harmonic(k: float = 1.0) -> LagrangianModel:
    """Harmonic oscillator, f = y'^2 / 2 - k y^2 / 2."""
    k = float(k)
    if not math.isfinite(k):
        raise ConfigurationError(f"k must be finite, got {k}")

    def value(x, y, yp):
        return 0.5 * yp**2 - 0.5 * k * y**2

    def partials(x, y, yp):
        zero = np.zeros_like(y)
        return {
            "f": value(x, y, yp),
            "f_y": -k * y,
            "f_yp": yp + zero,
            "f_yy": zero - k,
            "f_yyp": zero,
            "f_ypyp": zero + 1.0,
            "f_yyyp": zero,
            "f_yypyp": zero,
            "f_ypypyp": zero,
            "f_xyyp": zero,
            "f_xypyp": zero,
            "f_xyp": zero,
        }

    return LagrangianModel("harmonic", value, partials, {"k": k})


def arclength() -> LagrangianModel:
    """Arc length of a graph, f = sqrt(1 + y'^2)."""

    def value(x, y, yp):
        return np.sqrt(1.0 + yp**2)

    def partials(x, y, yp):
        s = np.sqrt(1.0 + yp**2)
        zero = np.zeros_like(yp)
        return {
            "f": s,
            "f_y": zero,
            "f_yp": yp / s,
            "f_yy": zero,
            "f_yyp": zero,
            "f_ypyp": 1.0 / s**3,
            "f_yyyp": zero,
            "f_yypyp": zero,
            "f_ypypyp": -3.0 * yp / s**5,
            "f_xyyp": zero,
            "f_xypyp": zero,
            "f_xyp": zero,
        }

    return LagrangianModel("arclength", value, partials, {})


def poly(coeffs: Optional[Mapping] = None) -> LagrangianModel:
    """Polynomial Lagrangian  f = sum c[i, j, k] x^i y^j y'^k.

    ``coeffs`` maps exponent triples (i, j, k) to coefficients; the default
    is the bilinear form f = y y'.
    """
    if coeffs is None:
        coeffs = {(0, 1, 1): 1.0}
    if not coeffs:
        raise ConfigurationError("poly model needs at least one coefficient")
    shape = [1, 1, 1]
    for exps in coeffs:
        if len(exps) != 3 or any(int(e) != e or e < 0 for e in exps):
            raise ConfigurationError(f"exponents must be three non-negative integers, got {exps}")
        shape = [max(s, int(e) + 1) for s, e in zip(shape, exps)]
    c = np.zeros(shape)
    for exps, v in coeffs.items():
        v = float(v)
        if not math.isfinite(v):
            raise ConfigurationError(f"coefficient for {exps} is not finite")
        c[tuple(int(e) for e in exps)] += v

    derived = {}
    for name, orders in _MULTI_INDEX.items():
        d = c
        for axis, o in enumerate(orders):
            if o:
                d = P.polyder(d, m=o, axis=axis)
        derived[name] = d

    def value(x, y, yp):
        return P.polyval3d(x, y, yp, c)

    def partials(x, y, yp):
        return {name: P.polyval3d(x, y, yp, d) for name, d in derived.items()}

    params = {"coeffs": {tuple(int(e) for e in k): float(v) for k, v in coeffs.items()}}
    return LagrangianModel("poly", value, partials, params)


_CATALOG = {
    "pendulum": (pendulum, ("m", "ell", "g"), ("equilibrium", "linear", "separatrix", "rk4", "sampled")),
    "harmonic": (harmonic, ("k",), ("equilibrium", "linear", "sampled")),
    "arclength": (arclength, (), ("equilibrium", "linear", "sampled")),
    "poly": (poly, ("coeffs",), ("equilibrium", "linear", "sampled")),
}


def catalog_names() -> list:
    return list(_CATALOG)


def catalog_info() -> list:
    """Name, parameter keys and supported trajectory kinds of each entry."""
    return [
        {"name": name, "params": list(keys), "trajectories": list(trajs)}
        for name, (_, keys, trajs) in _CATALOG.items()
    ]


def get_model(name: str, **params) -> LagrangianModel:
    """Look up a catalog entry by name and instantiate it with ``params``."""
    try:
        factory, keys, _ = _CATALOG[name]
    except KeyError:
        raise ModelNotFoundError(
            f"unknown model {name!r}; valid names: {', '.join(_CATALOG)}"
        ) from None
    unknown = set(params) - set(keys)
    if unknown:
        raise ConfigurationError(
            f"model {name!r} takes parameters {list(keys)}, got unexpected {sorted(unknown)}"
        )
    return factory(**params)


def catalog() -> list:
    """Every catalog entry at its default parameters."""
    return [factory() for factory, _, _ in _CATALOG.values()]
