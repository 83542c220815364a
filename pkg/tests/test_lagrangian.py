import math

import numpy as np
import pytest

from varineq.errors import CapabilityError, ConfigurationError, EvaluationError, ModelNotFoundError
from varineq.lagrangian import (
    FIELD_NAMES,
    LagrangianModel,
    Point3,
    catalog,
    eval_partials,
    fd_partials,
    get_model,
    numeric_model,
    pendulum,
    poly,
    _MULTI_INDEX,
)

FD_TOL = {0: 0.0, 1: 1e-10, 2: 1e-7, 3: 1e-4}


def _fd_close(exact, approx, fname):
    tol = FD_TOL[sum(_MULTI_INDEX[fname])]
    ex, ap = getattr(exact, fname), getattr(approx, fname)
    scale = max(1.0, abs(exact.f), abs(ex))
    return abs(ex - ap) <= max(tol * scale, 1e-12)


def test_pendulum_partials_at_rest():
    p = eval_partials(pendulum(1, 1, 1), Point3(0.0, 0.0, 0.0))
    assert p.f == 1.0
    assert p.f_y == 0.0 and p.f_yp == 0.0
    assert p.f_yy == -1.0 and p.f_yyp == 0.0 and p.f_ypyp == 1.0
    assert p.f_yyyp == p.f_yypyp == p.f_ypypyp == 0.0


@pytest.mark.parametrize("pt", [(0, 0.3, -1.2), (5, 2.0, 4.0), (-1, -3.0, 0.1)])
def test_pendulum_third_partials_vanish(pt):
    p = eval_partials(pendulum(2.0, 0.5, 9.8), pt)
    for name in ("f_yyp", "f_yyyp", "f_yypyp", "f_ypypyp", "f_xyyp", "f_xypyp"):
        assert getattr(p, name) == 0.0


def test_bilinear_form():
    p = eval_partials(poly({(0, 1, 1): 1.0}), (0, 2, 3))
    assert (p.f, p.f_y, p.f_yp, p.f_yyp) == (6.0, 3.0, 2.0, 1.0)
    for name in FIELD_NAMES:
        if name not in ("f", "f_y", "f_yp", "f_yyp"):
            assert getattr(p, name) == 0.0


def test_poly_mixed_x_partials():
    # f = x^2 y y'^2: f_xyy' = 4 x y', f_xy'y' = 4 x y, f_xy' = 4 x y y'
    p = eval_partials(poly({(2, 1, 2): 1.0}), (1.5, 2.0, -1.0))
    assert p.f_xyyp == pytest.approx(4 * 1.5 * -1.0)
    assert p.f_xypyp == pytest.approx(4 * 1.5 * 2.0)
    assert p.f_xyp == pytest.approx(4 * 1.5 * 2.0 * -1.0)


def test_fd_cubic_monomial():
    p = fd_partials(lambda x, y, yp: y**3, Point3(0, 2, 0))
    assert p.f_yy == pytest.approx(12.0, rel=1e-6)


def test_fd_constant():
    p = fd_partials(lambda x, y, yp: 7.0 + 0 * y, Point3(0.4, -1.0, 2.0))
    assert p.f == 7.0
    for name in FIELD_NAMES[1:]:
        assert abs(getattr(p, name)) <= 1e-10


def test_fd_matches_pendulum_catalog():
    m = pendulum(1, 1, 1)
    p = Point3(0.0, 0.5, 0.25)
    exact, approx = eval_partials(m, p), fd_partials(m.value, p)
    for name in FIELD_NAMES:
        assert _fd_close(exact, approx, name), name


@pytest.mark.parametrize("model", catalog() + [pendulum(2.0, 0.7, 1.3), get_model("harmonic", k=-2.5)], ids=repr)
def test_fd_agrees_with_analytic_on_random_points(model):
    rng = np.random.default_rng(20261019)
    for _ in range(100):
        p = Point3(*rng.uniform(-2.0, 2.0, 3))
        exact, approx = eval_partials(model, p), fd_partials(model.value, p)
        for name in FIELD_NAMES:
            assert _fd_close(exact, approx, name), (name, p)


@pytest.mark.parametrize("model", catalog(), ids=repr)
def test_analytic_partials_deterministic(model):
    p = Point3(0.3, -0.7, 1.9)
    assert eval_partials(model, p) == eval_partials(model, p)


def test_numeric_model_provider():
    m = numeric_model("quartic", lambda x, y, yp: y**4 + yp**2)
    assert m.provider == "numeric"
    p = eval_partials(m, (0, 1.0, 0.5))
    assert p.f_yy == pytest.approx(12.0, rel=1e-7)
    assert p.f_ypyp == pytest.approx(2.0, rel=1e-7)


@pytest.mark.parametrize("steps", [(0.0, 1e-4, 1e-3), (1e-6, -1e-4, 1e-3), (1e-6,)])
def test_fd_rejects_bad_steps(steps):
    with pytest.raises(ConfigurationError):
        fd_partials(lambda x, y, yp: y, Point3(0, 0, 0), steps)
    with pytest.raises(ConfigurationError):
        numeric_model("bad", lambda x, y, yp: y, steps=steps)


def test_catalog_lookup():
    m = get_model("pendulum", m=1, ell=2, g=9.8)
    for pt in [(0, 0, 0), (1, 2, 3), (-4, 0.1, -7)]:
        assert eval_partials(m, pt).f_ypyp == 4.0
    h = get_model("harmonic", k=1)
    for pt in [(0, 0, 0), (1, 2, 3)]:
        p = eval_partials(h, pt)
        assert (p.f_yy, p.f_ypyp) == (-1.0, 1.0)


def test_catalog_contents():
    names = [m.name for m in catalog()]
    assert {"pendulum", "harmonic", "arclength", "poly"} <= set(names)
    assert all(m.provider == "analytic" for m in catalog())


def test_unknown_model_lists_valid_names():
    with pytest.raises(ModelNotFoundError, match="pendulum"):
        get_model("nosuch")


def test_unknown_parameter():
    with pytest.raises(ConfigurationError):
        get_model("harmonic", m=2)


def test_non_finite_partial_names_field():
    m = LagrangianModel("blowup", lambda x, y, yp: y, lambda x, y, yp: {
        **{n: 0.0 for n in FIELD_NAMES}, "f_yy": np.exp(1000.0 * y)})
    with pytest.raises(EvaluationError, match="f_yy"):
        eval_partials(m, (0, 1.0, 0))


def test_missing_optional_partials_raise_on_require():
    m = LagrangianModel("partial", lambda x, y, yp: y, lambda x, y, yp: {n: 0.0 for n in FIELD_NAMES[:9]})
    p = eval_partials(m, (0, 0, 0))
    assert p.f_xyyp is None
    with pytest.raises(CapabilityError):
        p.require("f_xyyp")


def test_array_evaluation_matches_pointwise():
    m = get_model("arclength")
    x = np.linspace(0, 1, 5)
    yp = np.linspace(-2, 2, 5)
    arr = m.partials_at(x, 0 * x, yp)
    for i in range(5):
        pt = eval_partials(m, (x[i], 0.0, yp[i]))
        assert arr.f_ypypyp[i] == pt.f_ypypyp
    assert math.isclose(arr.f_ypyp[2], 1.0)
