import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from chernscal import toric_futaki as tf
from chernscal.toric_futaki import AffineWeight, Poly, PolynomialToricMetric

I1 = tf.interval()
SQ = tf.unit_square()
FLAT1, FLAT2 = AffineWeight.flat(1), AffineWeight.flat(2)
Z1 = Poly.coordinate(1, 0)
ONE1 = Poly.constant(1)
H_SPHERE = PolynomialToricMetric.diagonal_product(1)
H_PRODUCT = PolynomialToricMetric.diagonal_product(2)
SLOPES = [0, Fraction(1, 4), Fraction(-1, 4), Fraction(1, 2), Fraction(-1, 2), 1, -1, 2, -2]


def admissible(a) -> AffineWeight:
    a = Fraction(a)
    return AffineWeight((a,), 1 if a >= 0 else 1 - a + Fraction(1, 2))


# -- polytopes -----------------------------------------------------------------

def test_delzant_violation():
    F = Fraction
    facets = (tf.Facet((1, 0), F(0)), tf.Facet((0, 1), F(0)), tf.Facet((-1, -2), F(2)))
    verts = ((F(0), F(0)), (F(2), F(0)), (F(0), F(1)))
    with pytest.raises(tf.PolytopeError, match="Delzant"):
        tf.Polytope(2, facets, verts)


def test_unbounded_rejected():
    with pytest.raises(tf.PolytopeError):
        tf.Polytope(1, (tf.Facet((1,), Fraction(0)),), ((Fraction(0),), (Fraction(1),)))


def test_vertex_outside_rejected():
    with pytest.raises(tf.PolytopeError):
        tf.Polytope(1, (tf.Facet((1,), Fraction(0)), tf.Facet((-1,), Fraction(1))),
                    ((Fraction(0),), (Fraction(2),)))


def test_polytope_json_round_trip():
    assert tf.Polytope.from_json(SQ.to_json()) == SQ


def test_weight_must_be_positive_at_vertices():
    with pytest.raises(tf.WeightError):
        tf.integrate_interior(I1, AffineWeight((-1,), 1), ONE1)


# -- integrals -------------------------------------------------------------------

def test_interior_examples():
    assert tf.integrate_interior(I1, FLAT1, Z1) == pytest.approx(0.5, abs=1e-15)
    assert tf.integrate_interior(I1, AffineWeight((1,), 1), ONE1) == pytest.approx(math.log(2),
                                                                                    rel=1e-15)
    assert tf.integrate_interior(SQ, FLAT2, Poly(2, {(1, 1): 1})) == pytest.approx(0.25,
                                                                                   rel=1e-13)


def test_boundary_examples():
    assert tf.integrate_boundary(I1, FLAT1, Z1) == 1
    assert tf.integrate_boundary(SQ, FLAT2, Poly.constant(2)) == pytest.approx(4, rel=1e-14)
    assert tf.integrate_boundary(I1, AffineWeight((1,), 1), ONE1) == 1.5


@given(st.sampled_from(SLOPES), st.integers(0, 4), st.sampled_from(["nf", "(n+2)f"]))
def test_interval_integrals_match_sympy(a, k, mode):
    w = admissible(a)
    z = sp.symbols("z")
    u = sp.Rational(str(w.a[0])) * z + sp.Rational(str(w.a_const))
    power = -1 if mode == "nf" else -3
    expected = float(sp.integrate(z ** k * u ** power, (z, 0, 1)))
    got = tf.integrate_interior(I1, w, Poly(1, {(k,): 1}), mode)
    assert got == pytest.approx(expected, rel=1e-13, abs=1e-15)


@given(st.fractions(-1, 1, max_denominator=8), st.fractions(-1, 1, max_denominator=8),
       st.sampled_from(["nf", "(n+2)f"]))
def test_square_quadrature_converges(a1, a2, mode):
    w = AffineWeight((a1, a2), 3)
    xi = Poly(2, {(1, 0): 1, (0, 2): 2})
    q = tf.integrate_interior(SQ, w, xi, mode, with_error=True)
    assert q.error_estimate <= 1e-9 * abs(q.value)
    b = tf.integrate_boundary(SQ, w, xi, with_error=True)
    assert b.error_estimate <= 1e-9 * abs(b.value)


def test_square_against_sympy():
    z1, z2 = sp.symbols("z1 z2")
    w = AffineWeight((Fraction(1, 2), Fraction(1, 3)), 1)
    u = z1 / 2 + z2 / 3 + 1
    expected = float(sp.integrate(sp.integrate(z1 * z2 / u ** 2, (z1, 0, 1)), (z2, 0, 1)))
    got = tf.integrate_interior(SQ, w, Poly(2, {(1, 1): 1}), "(n+2)f")
    assert got == pytest.approx(expected, rel=1e-12)


# -- Futaki ------------------------------------------------------------------------

def test_flat_interval_futaki():
    rep = tf.futaki(I1, FLAT1)
    assert rep.futaki_values["z1"] == 0 and rep.C_value == 4
    assert rep.boundary_mass == 2 and rep.interior_mass == 1


def test_flat_square_futaki():
    rep = tf.futaki(SQ, FLAT2)
    assert abs(rep.futaki_values["z1"]) < 1e-12 and abs(rep.futaki_values["z2"]) < 1e-12


@given(st.fractions(-1, 1, max_denominator=6), st.fractions(-1, 1, max_denominator=6),
       st.fractions(Fraction(13, 6), 5, max_denominator=6))
def test_futaki_of_constant_vanishes_and_C_positive(a1, a2, b):
    rep = tf.futaki(SQ, AffineWeight((a1, a2), b))
    assert abs(rep.futaki_values["1"]) <= 1e-12 * rep.boundary_mass
    assert rep.C_value > 0


# -- metrics and the curvature equation ------------------------------------------------

def test_metric_boundary_conditions():
    assert H_SPHERE.boundary_residual(I1) == 0
    assert H_PRODUCT.boundary_residual(SQ) == 0
    assert H_PRODUCT.is_positive(SQ) and H_PRODUCT.symmetry_residual() == 0


@pytest.mark.parametrize("weight,xi,tol", [(FLAT1, ONE1, 1e-10), (AffineWeight((1,), 1), Z1, 1e-8),
                                           (admissible(-2), Z1, 1e-10)])
def test_ibp_interval(weight, xi, tol):
    assert tf.ibp_residual(I1, weight, H_SPHERE, xi) <= tol


@pytest.mark.parametrize("weight", [FLAT2, AffineWeight((Fraction(1, 3), Fraction(-1, 4)), 1)])
def test_ibp_square(weight):
    for xi in (Poly.constant(2), Poly.coordinate(2, 0), Poly.coordinate(2, 1)):
        assert tf.ibp_residual(SQ, weight, H_PRODUCT, xi) <= 1e-6


def test_toric_scalar_examples():
    r = tf.toric_scalar(H_SPHERE, FLAT1, [0.3], I1)
    assert r.sH == 4 and r.sH_conformal == 4 and r.eq_residual <= 1e-12
    assert tf.toric_scalar(H_SPHERE, AffineWeight((1,), 1), [0.5]).eq_residual <= 1e-10
    with pytest.raises(ValueError):
        tf.toric_scalar(H_SPHERE, FLAT1, [1.0], I1)


def _sympy_residual(entries, a, b, z):
    """Independent symbolic value of e^{(n+2)f} s_conf + sum (u^{-1} H_ij)_{,ij}."""
    n = len(a)
    zs = sp.symbols(f"z1:{n + 1}")
    u = sum(sp.Rational(str(ai)) * zi for ai, zi in zip(a, zs)) + sp.Rational(str(b))
    H = [[sum(sp.Rational(str(c)) * sp.prod([zs[i] ** e for i, e in enumerate(k)])
              for k, c in entries[i][j].terms.items()) for j in range(n)] for i in range(n)]
    div = sum(sp.diff(H[i][j] / u, zs[i], zs[j]) for i in range(n) for j in range(n))
    p = sp.Rational(2, n)
    ai = [sp.Rational(str(x)) for x in a]
    sconf = (-u ** p * sum(sp.diff(H[i][j], zs[i], zs[j]) for i in range(n) for j in range(n))
             + 2 * u ** (p - 1) * sum(ai[i] * sp.diff(H[i][j], zs[j])
                                      for i in range(n) for j in range(n))
             - 2 * u ** (p - 2) * sum(ai[i] * ai[j] * H[i][j] for i in range(n) for j in range(n)))
    expr = u ** (-sp.Rational(n + 2, n)) * sconf + div
    return float(expr.subs(dict(zip(zs, z))))


coef = st.fractions(-3, 3, max_denominator=5)
monos = st.sampled_from([(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (1, 2)])
polys2 = st.dictionaries(monos, coef, min_size=1, max_size=4).map(lambda d: Poly(2, d))


@given(polys2, polys2, polys2, st.fractions(-1, 1, max_denominator=4),
       st.fractions(-1, 1, max_denominator=4), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_toric_equation_identity_random(h11, h12, h22, a1, a2, x, y):
    metric = PolynomialToricMetric.from_polys([[h11, h12], [h12, h22]])
    weight = AffineWeight((a1, a2), 3)
    r = tf.toric_scalar(metric, weight, [x, y], SQ)
    assert r.eq_residual <= 1e-9
    oracle = _sympy_residual(metric.entries, weight.a, weight.a_const, (x, y))
    assert abs(oracle) <= 1e-9


# -- interval solve ------------------------------------------------------------------------

def test_flat_interval_solution():
    sol = tf.solve_interval(FLAT1)
    assert sol.kappa == pytest.approx(4) and sol.compat <= 1e-14
    assert sol.H_coeffs == pytest.approx((0, 2, -2), abs=1e-14)


@pytest.mark.parametrize("a", SLOPES)
def test_obstruction_equivalence(a):
    w = admissible(a)
    sol = tf.solve_interval(w)
    rep = tf.futaki(I1, w)
    if sol.compat <= 1e-9:
        assert abs(rep.futaki_values["z1"]) <= 1e-8
        assert sol.kappa == pytest.approx(rep.C_value, rel=1e-9)
    for key, target in (("H0", 0), ("H1", 0), ("dH0", 2)):
        assert sol.boundary_values[key] == pytest.approx(target, abs=1e-12)


def test_solution_satisfies_equation():
    w = AffineWeight((Fraction(1, 2),), 1)
    sol = tf.solve_interval(w)
    metric = PolynomialToricMetric.from_polys(
        [[Poly(1, {(k,): Fraction(repr(v)) for k, v in enumerate(sol.H_coeffs)})]])
    for z in (0.2, 0.5, 0.9):
        lhs = tf.weighted_divergence(metric, w, [z])
        assert lhs == pytest.approx(-sol.kappa * float(w.u([z])) ** -3, rel=1e-9)


def test_solve_interval_rejects_bad_weight():
    with pytest.raises(tf.WeightError):
        tf.solve_interval(AffineWeight((-2,), 1))
    with pytest.raises(tf.WeightError):
        tf.solve_interval(FLAT2)
