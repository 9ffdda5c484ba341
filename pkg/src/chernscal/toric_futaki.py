"""Weighted polytope integrals, the Donaldson-Futaki invariant of a conformal
weight, and the toric form of the conformally constant curvature equation.

For a Delzant polytope with inward facet normals u_j and an affine Killing
potential u(z) > 0 we put e^{nf} = u^{-1} and e^{(n+2)f} = u^{-(n+2)/n}. Interior
integrals use Lebesgue measure; facet integrals use dsigma/|u_j|.

Dimension 1 is handled exactly: after the substitution w = a z + b every
integrand is a Laurent polynomial in w, integrated with ``LogLaurent``.
Dimension 2 uses a fan triangulation and collapsed tensor Gauss rules, with the
change under order doubling reported as the error estimate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import numpy as np

from .exactpoly import LogLaurent

GAUSS_ORDER = 12


class PolytopeError(ValueError):
    pass


class WeightError(ValueError):
    pass


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    return Fraction(repr(float(v)))


# -- polynomials in n variables ------------------------------------------------

@dataclass(frozen=True)
class Poly:
    """Polynomial in z_1..z_n as {exponent tuple: coefficient}."""

    n: int
    terms: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        clean = {}
        for k, v in dict(self.terms).items():
            k = tuple(int(e) for e in k)
            if len(k) != self.n or min(k, default=0) < 0:
                raise ValueError(f"bad exponent {k} for n = {self.n}")
            q = _frac(v)
            if q:
                clean[k] = clean.get(k, Fraction(0)) + q
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v})

    @classmethod
    def constant(cls, n: int, c=1) -> "Poly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def coordinate(cls, n: int, i: int) -> "Poly":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def affine(cls, coeffs: Sequence, const=0) -> "Poly":
        n = len(coeffs)
        terms = {(0,) * n: const}
        for i, a in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = a
        return cls(n, terms)

    def __add__(self, other: "Poly") -> "Poly":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return Poly(self.n, t)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            q = _frac(other)
            return Poly(self.n, {k: q * v for k, v in self.terms.items()})
        t: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                t[k] = t.get(k, 0) + v1 * v2
        return Poly(self.n, t)

    __rmul__ = __mul__

    def diff(self, i: int) -> "Poly":
        t = {}
        for k, v in self.terms.items():
            if k[i]:
                e = list(k)
                e[i] -= 1
                t[tuple(e)] = v * k[i]
        return Poly(self.n, t)

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape[:-1])
        for k, v in self.terms.items():
            term = float(v) * np.ones(z.shape[:-1])
            for i, e in enumerate(k):
                if e:
                    term = term * z[..., i] ** e
            out = out + term
        return out

    def univariate(self) -> dict[int, Fraction]:
        if self.n != 1:
            raise ValueError("univariate view needs n = 1")
        return {k[0]: v for k, v in self.terms.items()}

    def to_json(self) -> list:
        return [[list(k), str(v)] for k, v in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, n: int, data) -> "Poly":
        return cls(n, {tuple(k): _frac(v) for k, v in data})


# -- polytopes and weights --------------------------------------------------------

@dataclass(frozen=True)
class Facet:
    u: tuple[int, ...]
    lam: Fraction

    def ell(self, z) -> np.ndarray:
        return np.asarray(z, dtype=float) @ np.array(self.u, dtype=float) + float(self.lam)

    def ell_exact(self, z: Sequence[Fraction]) -> Fraction:
        return sum((ui * zi for ui, zi in zip(self.u, z)), Fraction(0)) + self.lam


@dataclass(frozen=True)
class Polytope:
    n: int
    facets: tuple[Facet, ...]
    vertices: tuple[tuple[Fraction, ...], ...]
    name: str = "polytope"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        n = self.n
        if n not in (1, 2):
            raise PolytopeError("only n = 1 and n = 2 are supported")
        if any(len(f.u) != n for f in self.facets) or any(len(v) != n for v in self.vertices):
            raise PolytopeError("dimension mismatch in facets or vertices")
        if len(self.vertices) < n + 1:
            raise PolytopeError("polytope is not full-dimensional or not bounded")
        if not _normals_positively_span(np.array([f.u for f in self.facets], dtype=float)):
            raise PolytopeError("polytope is unbounded (normals do not positively span)")
        for f in self.facets:
            if math.gcd(*[abs(x) for x in f.u]) != 1:
                raise PolytopeError(f"normal {f.u} is not primitive")
        for v in self.vertices:
            vals = [f.ell_exact(v) for f in self.facets]
            if min(vals) < 0:
                raise PolytopeError(f"vertex {tuple(map(str, v))} violates a facet inequality")
            on = [f for f, val in zip(self.facets, vals) if val == 0]
            if len(on) != n:
                raise PolytopeError(f"vertex {tuple(map(str, v))} lies on {len(on)} facets, "
                                    f"expected {n}")
            det = round(np.linalg.det(np.array([f.u for f in on], dtype=float)))
            if abs(det) != 1:
                raise PolytopeError(f"Delzant condition fails at vertex {tuple(map(str, v))}")
        for f in self.facets:
            if sum(1 for v in self.vertices if f.ell_exact(v) == 0) != n:
                raise PolytopeError(f"facet {f.u} does not carry {n} vertices")

    @property
    def vertex_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices])

    def facet_vertices(self, f: Facet) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.vertices if f.ell_exact(v) == 0])

    def ordered_vertices(self) -> np.ndarray:
        V = self.vertex_array
        if self.n == 1:
            return np.sort(V, axis=0)
        c = V.mean(axis=0)
        ang = np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0])
        return V[np.argsort(ang)]

    def is_interior(self, z) -> bool:
        return all(f.ell(z) > 0 for f in self.facets)

    def to_json(self) -> dict:
        return {"name": self.name, "n": self.n,
                "facets": [{"u": list(f.u), "lambda": str(f.lam)} for f in self.facets],
                "vertices": [[str(x) for x in v] for v in self.vertices]}

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        try:
            facets = tuple(Facet(tuple(int(x) for x in f["u"]), _frac(f["lambda"]))
                           for f in data["facets"])
            verts = tuple(tuple(_frac(x) for x in v) for v in data["vertices"])
            return cls(int(data["n"]), facets, verts, data.get("name", "polytope"))
        except (KeyError, TypeError) as exc:
            raise PolytopeError(f"malformed polytope data: {exc}") from None

    @classmethod
    def load(cls, path) -> "Polytope":
        return cls.from_json(json.loads(Path(path).read_text()))


def _normals_positively_span(U: np.ndarray) -> bool:
    n = U.shape[1]
    if n == 1:
        return bool(np.any(U[:, 0] > 0) and np.any(U[:, 0] < 0))
    ang = np.sort(np.arctan2(U[:, 1], U[:, 0]))
    gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * np.pi]))
    return bool(np.max(gaps) < np.pi - 1e-12)


def interval(lo=0, hi=1) -> Polytope:
    lo, hi = _frac(lo), _frac(hi)
    return Polytope(1, (Facet((1,), -lo), Facet((-1,), hi)), ((lo,), (hi,)), "interval")


def unit_square() -> Polytope:
    F = Fraction
    facets = (Facet((1, 0), F(0)), Facet((0, 1), F(0)), Facet((-1, 0), F(1)), Facet((0, -1), F(1)))
    verts = ((F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1)))
    return Polytope(2, facets, verts, "square")


@dataclass(frozen=True)
class AffineWeight:
    """u(z) = <a, z> + a_const, with f = -(1/n) ln u."""

    a: tuple[Fraction, ...]
    a_const: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(_frac(x) for x in self.a))
        object.__setattr__(self, "a_const", _frac(self.a_const))

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def a_float(self) -> np.ndarray:
        return np.array([float(x) for x in self.a])

    def u(self, z) -> np.ndarray:
        return np.asarray(z, dtype=float) @ self.a_float + float(self.a_const)

    def u_exact(self, z: Sequence[Fraction]) -> Fraction:
        return sum((ai * zi for ai, zi in zip(self.a, z)), Fraction(0)) + self.a_const

    def f(self, z) -> np.ndarray:
        return -np.log(self.u(z)) / self.n

    def check(self, poly: Polytope) -> None:
        if self.n != poly.n:
            raise WeightError("weight and polytope dimensions differ")
        for v in poly.vertices:
            if self.u_exact(v) <= 0:
                raise WeightError(f"u <= 0 at vertex {tuple(map(str, v))}")

    def to_json(self) -> dict:
        return {"a": [str(x) for x in self.a], "a_const": str(self.a_const)}

    @classmethod
    def from_json(cls, data: dict) -> "AffineWeight":
        try:
            return cls(tuple(data["a"]), data["a_const"])
        except (KeyError, TypeError) as exc:
            raise WeightError(f"malformed weight data: {exc}") from None

    @classmethod
    def load(cls, path) -> "AffineWeight":
        return cls.from_json(json.loads(Path(path).read_text()))

    @classmethod
    def flat(cls, n: int) -> "AffineWeight":
        return cls((0,) * n, 1)


# -- toric metrics -----------------------------------------------------------------

class ToricMetric(Protocol):
    n: int

    def H(self, z) -> np.ndarray: ...          # (n, n)
    def dH(self, z) -> np.ndarray: ...         # [i, j, k] = d_k H_ij
    def d2H(self, z) -> np.ndarray: ...        # [i, j, k, l] = d_k d_l H_ij


@dataclass(frozen=True)
class PolynomialToricMetric:
    entries: tuple[tuple[Poly, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def from_polys(cls, rows) -> "PolynomialToricMetric":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def diagonal_product(cls, n: int) -> "PolynomialToricMetric":
        """H = diag(2 z_i (1 - z_i)), the product of round spheres on [0,1]^n."""
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if i == j:
                    zi = Poly.coordinate(n, i)
                    row.append(zi * 2 + zi * zi * (-2))
                else:
                    row.append(Poly(n, {}))
            rows.append(row)
        return cls.from_polys(rows)

    def _eval(self, polys, z):
        z = np.asarray(z, dtype=float)
        return np.array([[p(z) for p in row] for row in polys])

    def H(self, z) -> np.ndarray:
        return self._eval(self.entries, z)

    def dH(self, z) -> np.ndarray:
        n = self.n
        return np.array([[[self.entries[i][j].diff(k)(z) for k in range(n)]
                          for j in range(n)] for i in range(n)])

    def d2H(self, z) -> np.ndarray:
        n = self.n
        return np.array([[[[self.entries[i][j].diff(k).diff(l)(z) for l in range(n)]
                           for k in range(n)] for j in range(n)] for i in range(n)])

    def symmetry_residual(self) -> float:
        n = self.n
        worst = 0.0
        for i in range(n):
            for j in range(n):
                d = self.entries[i][j] + self.entries[j][i] * -1
                worst = max(worst, max((abs(float(v)) for v in d.terms.values()), default=0.0))
        return worst

    def boundary_residual(self, poly: Polytope, samples: int = 5) -> float:
        """max over facet samples of |H u_j| and |sum_kl d_i H_kl u_k u_l - 2 u_i|."""
        worst = 0.0
        for f in poly.facets:
            V = poly.facet_vertices(f)
            ts = np.linspace(0.0, 1.0, samples) if poly.n == 2 else [0.0]
            u = np.array(f.u, dtype=float)
            for t in ts:
                z = V[0] if poly.n == 1 else (1 - t) * V[0] + t * V[1]
                worst = max(worst, float(np.max(np.abs(self.H(z) @ u))))
                dH = self.dH(z)
                val = np.einsum("kli,k,l->i", dH, u, u)
                worst = max(worst, float(np.max(np.abs(val - 2 * u))))
        return worst

    def is_positive(self, poly: Polytope, probes: int = 25, seed: int = 0) -> bool:
        for z in _interior_probes(poly, probes, np.random.default_rng(seed)):
            if np.min(np.linalg.eigvalsh(self.H(z))) <= 0:
                return False
        return True


def _interior_probes(poly: Polytope, count: int, rng: np.random.Generator) -> np.ndarray:
    V = poly.vertex_array
    w = rng.dirichlet(np.ones(len(V)), size=count)
    return w @ V


def weighted_divergence(metric: ToricMetric, weight: AffineWeight, z) -> float:
    """sum_ij (u^{-1} H_ij)_{,ij} at z from analytic partials."""
    a = weight.a_float
    u = float(weight.u(z))
    H, dH, d2H = metric.H(z), metric.dH(z), metric.d2H(z)
    t1 = np.einsum("ijij->", d2H)
    t2 = np.einsum("i,ijj->", a, dH) + np.einsum("j,iji->", a, dH)
    t3 = a @ H @ a
    return float(t1 / u - t2 / u ** 2 + 2 * t3 / u ** 3)


# -- quadrature ----------------------------------------------------------------------

def _triangle_rule(order: int):
    """Collapsed Gauss rule on the reference triangle {(s, t): s, t >= 0, s + t <= 1}."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1)
    w = 0.5 * w
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    s = X * (1 - Y)
    t = X * Y
    return np.stack([s.ravel(), t.ravel()], axis=1), (W * X).ravel()


def _fan_integral(poly: Polytope, g, order: int) -> float:
    V = poly.ordered_vertices()
    nodes, weights = _triangle_rule(order)
    total = 0.0
    v0 = V[0]
    for k in range(1, len(V) - 1):
        e1, e2 = V[k] - v0, V[k + 1] - v0
        jac = abs(e1[0] * e2[1] - e1[1] * e2[0])
        pts = v0 + nodes[:, :1] * e1 + nodes[:, 1:] * e2
        total += jac * float(np.dot(weights, g(pts)))
    return total


def _edge_integral(poly: Polytope, g, order: int) -> float:
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1)
    w = 0.5 * w
    total = 0.0
    for f in poly.facets:
        P0, P1 = poly.facet_vertices(f)
        length = float(np.linalg.norm(P1 - P0))
        pts = P0 + x[:, None] * (P1 - P0)
        total += length / float(np.linalg.norm(f.u)) * float(np.dot(w, g(pts)))
    return total


@dataclass(frozen=True)
class Quadrature:
    value: float
    error_estimate: float


def _with_estimate(fn, poly, g, order) -> Quadrature:
    lo = fn(poly, g, order)
    hi = fn(poly, g, 2 * order)
    return Quadrature(float(hi), float(abs(hi - lo)))


# -- exact one-dimensional integrals ---------------------------------------------------

def _poly_in_w(coeffs: Mapping[int, Fraction], weight: AffineWeight) -> LogLaurent:
    """Rewrite p(z) in w = a z + b (or w = z when a = 0)."""
    a, b = weight.a[0], weight.a_const
    if a == 0:
        return LogLaurent(dict(coeffs))
    out = LogLaurent.zero()
    zw = LogLaurent({1: 1 / a, 0: -b / a})  # z as a function of w
    for k, v in coeffs.items():
        term = LogLaurent.const(v)
        for _ in range(k):
            term = term * zw
        out = out + term
    return out


def _w_bounds(poly: Polytope, weight: AffineWeight) -> tuple[Fraction, Fraction, Fraction]:
    lo, hi = sorted(v[0] for v in poly.vertices)
    a, b = weight.a[0], weight.a_const
    if a == 0:
        return lo, hi, Fraction(1)
    return a * lo + b, a * hi + b, 1 / a


def _u_power_in_w(weight: AffineWeight, power: int) -> LogLaurent:
    a, b = weight.a[0], weight.a_const
    if a == 0:
        return LogLaurent.const(b ** power)
    return LogLaurent.monomial(power)


def _definite(F: LogLaurent, w0: Fraction, w1: Fraction, dps: int = 40) -> float:
    import mpmath

    with mpmath.workdps(dps):
        return float(F.evaluate_mp(w1, dps) - F.evaluate_mp(w0, dps))


def _interval_interior_exact(poly: Polytope, weight: AffineWeight, xi: Poly, power: int) -> float:
    w0, w1, dz_dw = _w_bounds(poly, weight)
    integrand = _poly_in_w(xi.univariate(), weight) * _u_power_in_w(weight, power)
    F = integrand.antiderivative()
    if weight.a[0] == 0 and (w0 <= 0 or w1 <= 0):
        # polynomial in z on an interval possibly touching 0: shift to stay in x > 0
        shift = 1 - min(w0, 0)
        xs = Poly(1, {(k,): v for k, v in xi.univariate().items()})
        integrand = _shifted(xs, -shift) * _u_power_in_w(weight, power)
        F = integrand.antiderivative()
        w0, w1 = w0 + shift, w1 + shift
    return float(dz_dw) * _definite(F, w0, w1)


def _shifted(p: Poly, s: Fraction) -> LogLaurent:
    """q(x) = p(x + s) as a LogLaurent in x."""
    out = LogLaurent.zero()
    xs = LogLaurent({1: 1, 0: s})
    for k, v in p.univariate().items():
        term = LogLaurent.const(v)
        for _ in range(k):
            term = term * xs
        out = out + term
    return out


# -- public operations -------------------------------------------------------------------

def integrate_interior(poly: Polytope, weight: AffineWeight, xi: Poly,
                       exponent_mode: str = "nf", order: int = GAUSS_ORDER,
                       with_error: bool = False):
    """Integral over the polytope of xi * u^{-1} ("nf") or xi * u^{-(n+2)/n} ("(n+2)f")."""
    weight.check(poly)
    n = poly.n
    if exponent_mode not in ("nf", "(n+2)f"):
        raise ValueError(f"unknown exponent mode {exponent_mode!r}")
    if n == 1:
        power = -1 if exponent_mode == "nf" else -3
        q = Quadrature(_interval_interior_exact(poly, weight, xi, power), 0.0)
    else:
        expo = -1.0 if exponent_mode == "nf" else -(n + 2) / n
        q = _with_estimate(_fan_integral, poly,
                           lambda z: xi(z) * np.exp(expo * np.log(weight.u(z))), order)
    return q if with_error else q.value


def integrate_boundary(poly: Polytope, weight: AffineWeight, xi: Poly,
                       order: int = GAUSS_ORDER, with_error: bool = False):
    """Sum over facets of the integral of xi * u^{-1} against dsigma/|u_j|."""
    weight.check(poly)
    if poly.n == 1:
        total = 0.0
        for v in poly.vertices:
            val = sum((c * v[0] ** k for k, c in xi.univariate().items()), Fraction(0))
            total += float(val / weight.u_exact(v))
        q = Quadrature(total, 0.0)
    else:
        q = _with_estimate(_edge_integral, poly, lambda z: xi(z) / weight.u(z), order)
    return q if with_error else q.value


@dataclass
class FutakiReport:
    boundary_mass: float
    interior_mass: float
    futaki_values: dict[str, float]
    C_value: float
    quadrature_error_estimate: float

    def to_dict(self) -> dict:
        return {"boundary_mass": self.boundary_mass, "interior_mass": self.interior_mass,
                "futaki_values": dict(self.futaki_values), "C_value": self.C_value,
                "quadrature_error_estimate": self.quadrature_error_estimate}


def futaki(poly: Polytope, weight: AffineWeight, order: int = GAUSS_ORDER) -> FutakiReport:
    n = poly.n
    basis = {"1": Poly.constant(n)}
    basis.update({f"z{i + 1}": Poly.coordinate(n, i) for i in range(n)})
    one = basis["1"]
    bm = integrate_boundary(poly, weight, one, order, with_error=True)
    im = integrate_interior(poly, weight, one, "(n+2)f", order, with_error=True)
    ratio = bm.value / im.value
    errs = [bm.error_estimate, im.error_estimate]
    values = {}
    for name, xi in basis.items():
        b = integrate_boundary(poly, weight, xi, order, with_error=True)
        i = integrate_interior(poly, weight, xi, "(n+2)f", order, with_error=True)
        errs += [b.error_estimate, i.error_estimate]
        values[name] = float(2 * b.value - 2 * ratio * i.value)
    C = 2 * ratio
    if not (bm.value > 0 and im.value > 0 and C > 0):
        raise WeightError("non-positive mass; weight is not admissible")
    if abs(values["1"]) > 1e-12 * max(1.0, 2 * bm.value):
        raise ArithmeticError(f"F(1) = {values['1']:.3e} should vanish")
    return FutakiReport(float(bm.value), float(im.value), values, float(C), float(max(errs)))


def ibp_residual(poly: Polytope, weight: AffineWeight, metric: ToricMetric, xi: Poly,
                 order: int = GAUSS_ORDER) -> float:
    """|-int xi * sum (u^{-1} H_ij)_{,ij} dv - 2 int_boundary u^{-1} xi dmu|."""
    weight.check(poly)
    rhs = 2 * integrate_boundary(poly, weight, xi, order)
    if poly.n == 1 and isinstance(metric, PolynomialToricMetric):
        lhs = -_interval_divergence_integral(poly, weight, metric, xi)
    else:
        def g(Z):
            return np.array([xi(z) * weighted_divergence(metric, weight, z) for z in Z])

        if poly.n == 1:
            lo, hi = sorted(float(v[0]) for v in poly.vertices)
            x, w = np.polynomial.legendre.leggauss(4 * order)
            pts = 0.5 * (hi - lo) * (x + 1) + lo
            lhs = -0.5 * (hi - lo) * float(np.dot(w, g(pts[:, None])))
        else:
            lhs = -_fan_integral(poly, g, order)
    return abs(lhs - rhs)


def _interval_divergence_integral(poly, weight, metric, xi) -> float:
    """Exact int xi (u^{-1} H)'' dz on an interval via w = a z + b."""
    H = metric.entries[0][0]
    a = weight.a[0]
    w0, w1, dz_dw = _w_bounds(poly, weight)
    if a == 0:
        G = LogLaurent(H.univariate()).scale(1 / weight.a_const)
        d2 = G.derivative().derivative()
        shift = 1 - min(w0, 0)
        d2 = _compose_shift(d2, -shift)
        integrand = d2 * _shifted(xi, -shift)
        return _definite(integrand.antiderivative(), w0 + shift, w1 + shift)
    G = _poly_in_w(H.univariate(), weight) * LogLaurent.monomial(-1)
    d2 = G.derivative().derivative().scale(a * a)
    integrand = d2 * _poly_in_w(xi.univariate(), weight)
    return float(dz_dw) * _definite(integrand.antiderivative(), w0, w1)


def _compose_shift(f: LogLaurent, s: Fraction) -> LogLaurent:
    """f(x + s) for a log-free polynomial f."""
    if f.has_log or (f.min_exponent() or 0) < 0:
        raise ValueError("shift composition needs a polynomial")
    return _shifted(Poly(1, {(k,): v for k, v in f.laurent_terms.items()}), s)


@dataclass(frozen=True)
class ToricScalar:
    sH: float
    sH_conformal: float
    eq_residual: float


def toric_scalar(metric: ToricMetric, weight: AffineWeight, z, poly: Polytope | None = None
                 ) -> ToricScalar:
    z = np.asarray(z, dtype=float)
    if poly is not None and not poly.is_interior(z):
        raise ValueError("z must be an interior point")
    n = metric.n
    a = weight.a_float
    u = float(weight.u(z))
    if u <= 0:
        raise WeightError("u <= 0 at z")
    H, dH, d2H = metric.H(z), metric.dH(z), metric.d2H(z)
    div2 = float(np.einsum("ijij->", d2H))
    sH = -div2
    p = 2.0 / n
    sHc = (-u ** p * div2 + 2 * u ** (p - 1) * float(np.einsum("i,ijj->", a, dH))
           - 2 * u ** (p - 2) * float(a @ H @ a))
    resid = abs(u ** (-(n + 2) / n) * sHc + weighted_divergence(metric, weight, z))
    return ToricScalar(sH, sHc, resid)


@dataclass
class IntervalSolution:
    a: Fraction
    b: Fraction
    kappa: float
    C1: float
    C2: float
    compat: float
    H_coeffs: tuple[float, float, float]   # H(z) = h0 + h1 z + h2 z^2
    lstsq: tuple[float, float, float]
    lstsq_residual: float
    boundary_values: dict = field(default_factory=dict)

    def H(self, z):
        h0, h1, h2 = self.H_coeffs
        z = np.asarray(z, dtype=float)
        return h0 + z * (h1 + h2 * z)

    def dH(self, z):
        _, h1, h2 = self.H_coeffs
        return h1 + 2 * h2 * np.asarray(z, dtype=float)

    def closed_form(self) -> str:
        h0, h1, h2 = self.H_coeffs
        return f"{h0!r} + {h1!r}*z + {h2!r}*z^2"

    def to_dict(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "kappa": self.kappa, "C1": self.C1,
                "C2": self.C2, "compat": self.compat, "H": self.closed_form(),
                "H_coeffs": list(self.H_coeffs), "lstsq": list(self.lstsq),
                "lstsq_residual": self.lstsq_residual,
                "boundary_values": dict(self.boundary_values)}


def solve_interval(weight: AffineWeight) -> IntervalSolution:
    """Solve (u^{-1} H)'' = -kappa u^{-3} on [0, 1] with H = u(-kappa G + C1 z + C2).

    G = z^2 / (2 b^2 u) satisfies G'' = u^{-3} for every slope, including a = 0, so
    H is a quadratic polynomial with no cancellation as a tends to 0. The conditions H(0) = H(1) = 0 and H'(0) = 2 fix
    (kappa, C1, C2); compat = |H'(1) + 2| measures the failure of the fourth one.
    """
    if weight.n != 1:
        raise WeightError("solve_interval needs n = 1")
    a, b = float(weight.a[0]), float(weight.a_const)
    if b <= 0 or a + b <= 0:
        raise WeightError("u must be positive on [0, 1]")

    # each unknown contributes a quadratic h0 + h1 z + h2 z^2 to H
    col_kappa = np.array([0.0, 0.0, -1 / (2 * b * b)])      # -u G = -z^2/(2b^2)
    col_C1 = np.array([0.0, b, a])                          # u z
    col_C2 = np.array([b, a, 0.0])                          # u
    Bq = np.column_stack([col_kappa, col_C1, col_C2])       # quadratic coeffs per unknown

    def rows(h):
        # H(0), H(1), H'(0), H'(1) for coefficient vectors h (3 x k)
        return np.array([h[0], h[0] + h[1] + h[2], h[1], h[1] + 2 * h[2]])

    M = rows(Bq)
    target = np.array([0.0, 0.0, 2.0, -2.0])
    x3 = np.linalg.solve(M[:3], target[:3])
    compat = abs(float(M[3] @ x3 - target[3]))
    xl, res, *_ = np.linalg.lstsq(M, target, rcond=None)
    coeffs = Bq @ x3
    sol = IntervalSolution(
        a=weight.a[0], b=weight.a_const, kappa=float(x3[0]), C1=float(x3[1]), C2=float(x3[2]),
        compat=compat, H_coeffs=tuple(float(c) for c in coeffs), lstsq=tuple(float(v) for v in xl),
        lstsq_residual=float(np.linalg.norm(M @ xl - target)))
    sol.boundary_values = {"H0": float(sol.H(0.0)), "H1": float(sol.H(1.0)),
                           "dH0": float(sol.dH(0.0)), "dH1": float(sol.dH(1.0))}
    return sol
