"""Geometric read-out of an ODE solution on the ruled manifold P(L + C).

The fibre profile is H(x) = f(x + lam) / P(x)^(n-1) on the moment interval
[0, 1]. From it we evaluate the Hermitian scalar curvature of the Calabi-type
Kaehler metric, that of the conformal rescaling u^-2 g with u = a x + b, and
the fundamental constant of the conformal class (base volume normalised to 1,
base scalar curvature identified with B).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .calabi_solver import OdeSolution, RuledParams
from .exactpoly import LogLaurent

ENDPOINT_TOL = 1e-9


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class FiberProfile:
    f: LogLaurent
    params: RuledParams
    H0: float = 0.0
    H1: float = 0.0
    dH0: float = 0.0
    dH1: float = 0.0

    def _P(self, x):
        return self.params.P(x)

    def H(self, x):
        x = np.asarray(x, dtype=float)
        lam = float(self.params.lam)
        return self.f(x + lam) / self._P(x) ** (self.params.n - 1)

    def dH(self, x):
        x = np.asarray(x, dtype=float)
        lam = float(self.params.lam)
        n, p = self.params.n, float(self.params.p)
        P = self._P(x)
        return (self.f.derivative()(x + lam) / P ** (n - 1)
                - (n - 1) * p * self.f(x + lam) / P ** n)

    def __call__(self, x):
        return self.H(x)


@dataclass
class CurvatureProfile:
    x: np.ndarray
    sH: np.ndarray
    sH_tilde: np.ndarray
    constant_value: float
    max_deviation: float


@dataclass
class FundamentalConstantReport:
    volume: float
    integral_sH: float
    C_value: float
    C_closed_form: float | None
    base_scalar: float  # s^H of the base, identified with the solver's B


def fiber_profile(sol: OdeSolution, params: RuledParams | None = None,
                  check: bool = True) -> FiberProfile:
    params = params or sol.params
    if float(params.c) <= 0 or float(params.p + params.c) <= 0:
        raise ProfileError("P vanishes on [0, 1]")
    prof = FiberProfile(f=sol.f, params=params)
    H0, H1 = float(prof.H(0.0)), float(prof.H(1.0))
    dH0, dH1 = float(prof.dH(0.0)), float(prof.dH(1.0))
    prof = FiberProfile(f=sol.f, params=params, H0=H0, H1=H1, dH0=dH0, dH1=dH1)
    if check:
        bad = [name for name, v, t in (("H(0)", H0, 0.0), ("H(1)", H1, 0.0),
                                       ("H'(0)", dH0, 2.0), ("H'(1)", dH1, -2.0))
               if abs(v - t) > ENDPOINT_TOL * max(1.0, abs(t))]
        if bad:
            raise ProfileError(f"endpoint conditions violated: {', '.join(bad)}")
    return prof


def hermitian_scalar(profile: FiberProfile, params: RuledParams | None = None,
                     B: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """s^H(x) = B/P - (P^(n-1) H)''/P^(n-1), with P^(n-1) H = f(x + lam)."""
    params = params or profile.params
    lam, n = float(params.lam), params.n
    ddf = profile.f.derivative().derivative()

    def sH(x):
        x = np.asarray(x, dtype=float)
        P = params.P(x)
        return B / P - ddf(x + lam) / P ** (n - 1)

    return sH


def conformal_scalar(profile: FiberProfile, params: RuledParams, sol: OdeSolution,
                     nodes: int = 257) -> CurvatureProfile:
    """Hermitian scalar curvature of u^-2 g for u = a x + b on a uniform grid."""
    lam, n, m = float(params.lam), params.n, params.m
    a, b = float(params.a), float(params.b)
    x = np.linspace(0.0, 1.0, nodes)
    P = params.P(x)
    Pn1 = P ** (n - 1)
    f = profile.f
    df = f.derivative()
    ddf = df.derivative()
    y = x + lam
    phi = a * x + b
    dphi = a
    sH = hermitian_scalar(profile, params, sol.B)(x)
    H = f(y) / Pn1
    sH_tilde = (phi ** 2 * sol.B / P
                - phi ** 2 * ddf(y) / Pn1
                + m * phi * dphi * df(y) / Pn1
                - m * dphi ** 2 * H)
    const = a * a * sol.A
    return CurvatureProfile(x=x, sH=sH, sH_tilde=sH_tilde, constant_value=const,
                            max_deviation=float(np.max(np.abs(sH_tilde - const))))


def base_volume(params: RuledParams) -> float:
    n, p, c = params.n, params.p, params.c
    return float(((p + c) ** n - c ** n) / (p * n))


def weighted_total(sH: Callable, params: RuledParams, method: str = "quad",
                   panels: int = 64) -> float:
    """Integral of s^H(x) P(x)^(n-1) over [0, 1]."""
    n = params.n

    def integrand(x):
        return sH(x) * params.P(x) ** (n - 1)

    if method == "quad":
        val, _ = integrate.quad(lambda t: float(integrand(t)), 0.0, 1.0,
                                epsabs=1e-10, epsrel=1e-10, limit=200)
        return val
    if method == "gauss":
        nodes, weights = np.polynomial.legendre.leggauss(10)
        edges = np.linspace(0.0, 1.0, panels + 1)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            xs = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
            total += 0.5 * (hi - lo) * float(np.dot(weights, integrand(xs)))
        return total
    raise ValueError(f"unknown quadrature {method!r}")


def closed_form_constant(params: RuledParams, base_scalar: float) -> float | None:
    if params.n != 2:
        return None
    c, p = float(params.c), float(params.p)
    return (2 * base_scalar + 8 * c + 4 * p) / (2 * c + p)


def constant_from_scalar(sH: Callable, params: RuledParams, base_scalar: float,
                         method: str = "quad", panels: int = 64) -> FundamentalConstantReport:
    vol = base_volume(params)
    total = weighted_total(sH, params, method=method, panels=panels)
    return FundamentalConstantReport(volume=vol, integral_sH=total, C_value=total / vol,
                                     C_closed_form=closed_form_constant(params, base_scalar),
                                     base_scalar=base_scalar)


def fundamental_constant(profile: FiberProfile, params: RuledParams, B: float,
                         method: str = "quad", panels: int = 64) -> FundamentalConstantReport:
    if params.p == 0:
        raise ValueError("p = 0 is excluded")
    sH = hermitian_scalar(profile, params, B)
    return constant_from_scalar(sH, params, B, method=method, panels=panels)


def geometry_to_dict(profile: FiberProfile, curv: CurvatureProfile,
                     fc: FundamentalConstantReport, params: RuledParams, grid: int) -> dict:
    xs = np.linspace(0.0, 1.0, grid)
    lam = float(params.lam)
    fx = profile.f(xs + lam)
    n = params.n
    ideal = 2 * float(params.c) ** (n - 1) * xs * (1 - xs)
    return {
        "H_samples": [[float(x), float(h)] for x, h in zip(xs, profile.H(xs))],
        "f_samples": [[float(x), float(v)] for x, v in zip(xs, fx)],
        "ideal_samples": [[float(x), float(v)] for x, v in zip(xs, ideal)],
        "sH_samples": [[float(x), float(v)] for x, v in zip(curv.x, curv.sH)],
        "sH_tilde_samples": [[float(x), float(v)] for x, v in zip(curv.x, curv.sH_tilde)],
        "constant_value": curv.constant_value,
        "max_deviation": curv.max_deviation,
        "endpoints": {"H0": profile.H0, "H1": profile.H1,
                      "dH0": profile.dH0, "dH1": profile.dH1},
        "C": {"value": fc.C_value, "closed_form": fc.C_closed_form,
              "volume": fc.volume, "base_scalar": fc.base_scalar},
    }
