from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from chernscal import calabi_solver as cs
from chernscal import ruled_geometry as rg

FIG1 = cs.RuledParams.from_lambda(4, 3, 3, Fraction(1, 2))


def _run(params):
    sol = cs.solve(params)
    prof = rg.fiber_profile(sol, params)
    return sol, prof


def test_fiber_profile_endpoint_conditions():
    _, prof = _run(FIG1)
    assert abs(prof.H0) < 1e-12 and abs(prof.H1) < 1e-12
    assert prof.dH0 == pytest.approx(2.0, abs=1e-11)
    assert prof.dH1 == pytest.approx(-2.0, abs=1e-11)


def test_fiber_profile_rejects_broken_solution():
    sol = cs.solve(FIG1)
    sol.f = sol.f + 0.1
    with pytest.raises(rg.ProfileError):
        rg.fiber_profile(sol, FIG1)


def test_dH_matches_finite_difference():
    _, prof = _run(FIG1)
    x = np.array([0.2, 0.5, 0.8])
    h = 1e-6
    fd = (prof.H(x + h) - prof.H(x - h)) / (2 * h)
    assert np.allclose(prof.dH(x), fd, atol=1e-7)


@pytest.mark.parametrize("m,p,c,lam", [(4, 3, 3, 0.5), (6, 2, 5, 1.0), (8, 1, 20, 0.3)])
def test_conformal_curvature_is_constant(m, p, c, lam):
    params = cs.RuledParams.from_lambda(m, p, c, lam)
    sol, prof = _run(params)
    curv = rg.conformal_scalar(prof, params, sol, nodes=257)
    assert curv.max_deviation <= 1e-8 * abs(curv.constant_value)
    assert curv.constant_value == pytest.approx(sol.A, rel=1e-14)


def test_general_a_scales_constant():
    params = cs.RuledParams(4, 3, 30, a=Fraction(2), b=Fraction(1))
    sol, prof = _run(params)
    curv = rg.conformal_scalar(prof, params, sol)
    assert curv.constant_value == pytest.approx(4 * sol.A)
    assert curv.max_deviation <= 1e-8 * abs(curv.constant_value)


def test_hermitian_scalar_without_base_term():
    """Without a base term s^H P^(n-1) = -(P^(n-1) H)''."""
    params = cs.RuledParams.from_lambda(4, 3, 30, 0.5)
    sol, prof = _run(params)
    sH = rg.hermitian_scalar(prof, params, B=0.0)
    x = np.linspace(0.1, 0.9, 5)
    ddf = sol.f.derivative().derivative()(x + 0.5)
    assert np.allclose(sH(x) * params.P(x), -ddf, rtol=1e-12)


def test_closed_form_constant_n2():
    sol, prof = _run(FIG1)
    fc = rg.fundamental_constant(prof, FIG1, sol.B)
    assert fc.C_value == pytest.approx(fc.C_closed_form, rel=1e-8)
    assert fc.C_value > 0
    assert fc.volume == pytest.approx(4.5)


def test_quadrature_methods_agree():
    params = cs.RuledParams.from_lambda(6, 2, 5, 1)
    sol, prof = _run(params)
    sH = rg.hermitian_scalar(prof, params, sol.B)
    q = rg.weighted_total(sH, params, "quad")
    g = rg.weighted_total(sH, params, "gauss")
    assert q == pytest.approx(g, rel=1e-12)
    with pytest.raises(ValueError):
        rg.weighted_total(sH, params, "simpson")


@given(st.floats(-0.9, 5.0).filter(lambda p: abs(p) > 1e-3), st.floats(0.1, 10.0),
       st.floats(-20, 20))
def test_constant_scalar_gives_that_constant(p, c, s0):
    """A constant s^H integrates to itself after dividing by the volume."""
    assume(p + c > 0.05)
    params = cs.RuledParams(6, p, c)
    rep = rg.constant_from_scalar(lambda x: s0 + 0 * np.asarray(x), params, 0.0)
    assert rep.C_value == pytest.approx(s0, abs=1e-9 * max(1, abs(s0)))


def test_closed_form_only_for_n2():
    assert rg.closed_form_constant(cs.RuledParams(6, 1, 1), 1.0) is None


def test_geometry_dict_shape():
    sol, prof = _run(FIG1)
    curv = rg.conformal_scalar(prof, FIG1, sol)
    fc = rg.fundamental_constant(prof, FIG1, sol.B)
    d = rg.geometry_to_dict(prof, curv, fc, FIG1, 101)
    assert len(d["f_samples"]) == 101 == len(d["ideal_samples"])
    assert d["ideal_samples"][50][1] == pytest.approx(1.5)
