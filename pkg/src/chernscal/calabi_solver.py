"""Closed-form boundary-value solver for the ruled-manifold profile ODE.

On [lam, 1+lam] we solve

    x^2 f'' - m x f' + m f = -A P(x-lam)^(n-1) + B x^2 P(x-lam)^(n-2),
    f(lam) = f(1+lam) = 0,  f'(lam) = 2 c^(n-1),  f'(1+lam) = -2 (p+c)^(n-1),

with P(x) = p x + c. The homogeneous solutions are x and x^m, so variation of
parameters gives f = (u1 + C) x + (u2 + D) x^m with exact Laurent/log
primitives u1, u2, and the four boundary conditions become a 4x4 linear
system in (A, B, C, D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np
from scipy.optimize import brentq

from .exactpoly import LogLaurent, Number, poly_pow

SINGULAR_THRESHOLD = 1e-10
POSITIVITY_GRID = 4096


class SolverError(Exception):
    """Base class for solver failures."""


class SingularSystem(SolverError):
    """The boundary-condition matrix is numerically singular."""


class NonPositiveAB(SolverError):
    """A solution exists but A <= 0 or B <= 0."""

    def __init__(self, msg, solution=None):
        super().__init__(msg)
        self.solution = solution


class NoAcceptableC(SolverError):
    """No probed c produced an accepted, positive solution."""


def _q(v: Number) -> Fraction:
    if isinstance(v, (float, np.floating)):
        # decimal reading, so 0.5 -> 1/2 and 0.1 -> 1/10
        return Fraction(repr(float(v)))
    return Fraction(v)


@dataclass(frozen=True)
class RuledParams:
    m: int
    p: Fraction
    c: Fraction
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(1, 2)

    def __post_init__(self):
        for name in ("p", "c", "a", "b"):
            object.__setattr__(self, name, _q(getattr(self, name)))
        if int(self.m) != self.m or self.m % 2 or self.m < 4:
            raise ValueError(f"m must be an even integer >= 4, got {self.m}")
        object.__setattr__(self, "m", int(self.m))
        if self.p == 0:
            raise ValueError("line-bundle degree p must be nonzero")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("conformal factor needs a > 0 and b > 0")
        if self.c <= 0 or self.p + self.c <= 0:
            raise ValueError("P(x) = p x + c must be positive on [0, 1]")

    @classmethod
    def from_lambda(cls, m: int, p: Number, c: Number, lam: Number) -> "RuledParams":
        return cls(m=m, p=p, c=c, a=Fraction(1), b=_q(lam))

    @property
    def n(self) -> int:
        return self.m // 2

    @property
    def lam(self) -> Fraction:
        return self.b / self.a

    def P(self, x):
        return float(self.p) * x + float(self.c)

    def with_c(self, c: Number) -> "RuledParams":
        return replace(self, c=_q(c))

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "p": str(self.p), "c": str(self.c),
                "a": str(self.a), "b": str(self.b), "lambda": str(self.lam)}


@dataclass(frozen=True)
class PositivityCertificate:
    mode: str  # proved-by-monotonicity | verified-by-sampling | failed
    critical_points: tuple[float, ...]
    min_value: float

    def to_dict(self) -> dict:
        return {"mode": self.mode, "critical_points": list(self.critical_points),
                "min_value": self.min_value}


@dataclass
class OdeSolution:
    params: RuledParams
    A: float
    B: float
    C: float
    D: float
    f: LogLaurent
    u1_A: LogLaurent
    u1_B: LogLaurent
    u2_A: LogLaurent
    u2_B: LogLaurent
    condition_number: float
    matrix: np.ndarray
    rhs: np.ndarray
    bc_residuals: tuple[float, ...] = ()
    positivity: PositivityCertificate | None = None

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D])

    def Q(self) -> LogLaurent:
        return build_Q(self.params, Fraction(self.A), Fraction(self.B))


@dataclass
class AsymptoticReport:
    c_values: list[float]
    A: list[float]
    B_over_c: list[float]
    C_over_cn1: list[float]
    D_over_cn2: list[float]
    A_limit: float
    B_slope: float
    C_slope: float
    D_bound: float
    K_pairs: list[float]
    x_infty_expected: tuple[float, float, float, float]
    max_relative_deviation: float


@dataclass
class ScanResult:
    c_star: float
    grid: list[float]
    verdicts: list[bool]
    refined: bool = field(default=False)


# -- construction -------------------------------------------------------------

def shifted_P(params: RuledParams) -> tuple[Fraction, Fraction]:
    """Coefficients (p, q) with P(x - lam) = p x + q."""
    return params.p, params.c - params.p * params.lam


def build_Q(params: RuledParams, A_coeff: Number, B_coeff: Number) -> LogLaurent:
    pp, qq = shifted_P(params)
    n = params.n
    x2 = LogLaurent.monomial(2)
    return (poly_pow(pp, qq, n - 1).scale(-Fraction(A_coeff))
            + (x2 * poly_pow(pp, qq, n - 2)).scale(Fraction(B_coeff)))


def basis_primitives(params: RuledParams):
    """Primitives (u1_A, u1_B, u2_A, u2_B) for unit A and unit B loads."""
    m = params.m
    out = []
    inv_x2 = LogLaurent.monomial(-2)
    inv_xm1 = LogLaurent.monomial(-m - 1)
    loads = (build_Q(params, 1, 0), build_Q(params, 0, 1))
    for Q in loads:
        out.append((Q * inv_x2).antiderivative().scale(Fraction(-1, m - 1)))
    for Q in loads:
        out.append((Q * inv_xm1).antiderivative().scale(Fraction(1, m - 1)))
    u1A, u1B, u2A, u2B = out
    return u1A, u1B, u2A, u2B


def _columns(params: RuledParams, prims) -> list[LogLaurent]:
    u1A, u1B, u2A, u2B = prims
    x = LogLaurent.x()
    xm = LogLaurent.monomial(params.m)
    return [u1A * x + u2A * xm, u1B * x + u2B * xm, x, xm]


def _rhs(params: RuledParams) -> list[Fraction]:
    n = params.n
    return [Fraction(0), Fraction(0), 2 * params.c ** (n - 1),
            -2 * (params.p + params.c) ** (n - 1)]


def _boundary_rows(params, cols, dps=40):
    lo, hi = params.lam, params.lam + 1
    dcols = [c.derivative() for c in cols]
    rows = []
    for funcs, pt in ((cols, lo), (cols, hi), (dcols, lo), (dcols, hi)):
        rows.append([Fraction(mpmath.nstr(fn.evaluate_mp(pt, dps), dps, strip_zeros=False))
                     for fn in funcs])
    return rows


def _solve_full_pivot(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    A = np.array(M, dtype=float)
    rhs = np.array(b, dtype=float)
    n = len(rhs)
    perm = list(range(n))
    for k in range(n):
        sub = np.abs(A[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        i += k
        j += k
        if A[i, j] == 0:
            raise SingularSystem("zero pivot")
        A[[k, i]] = A[[i, k]]
        rhs[[k, i]] = rhs[[i, k]]
        A[:, [k, j]] = A[:, [j, k]]
        perm[k], perm[j] = perm[j], perm[k]
        for r in range(k + 1, n):
            fac = A[r, k] / A[k, k]
            A[r, k:] -= fac * A[k, k:]
            rhs[r] -= fac * rhs[k]
    y = np.zeros(n)
    for k in range(n - 1, -1, -1):
        y[k] = (rhs[k] - A[k, k + 1:] @ y[k + 1:]) / A[k, k]
    x = np.zeros(n)
    x[perm] = y
    return x


def _refined_solve(M_exact, b_exact, iterations=3):
    M = np.array([[float(v) for v in row] for row in M_exact])
    scale = np.linalg.norm(M, axis=0)
    scale[scale == 0] = 1.0
    Ms = M / scale
    rows = np.linalg.norm(Ms, axis=1)
    hadamard = abs(np.linalg.det(Ms)) / np.prod(rows) if np.all(rows > 0) else 0.0
    if not hadamard >= SINGULAR_THRESHOLD:
        raise SingularSystem(
            f"boundary matrix near singular (|det|/prod(row norms) = {hadamard:.3e})")
    b = np.array([float(v) for v in b_exact])
    y = _solve_full_pivot(Ms, b)
    for _ in range(iterations):
        x = y / scale
        xf = [Fraction(v) for v in x]
        r = [b_exact[i] - sum(M_exact[i][j] * xf[j] for j in range(4)) for i in range(4)]
        dy = _solve_full_pivot(Ms, np.array([float(v) for v in r]))
        y = y + dy
    return y / scale, float(np.linalg.cond(M))


def assemble_and_solve(params: RuledParams, rhs_scale: Number = 1) -> OdeSolution:
    """Solve the four boundary conditions for (A, B, C, D).

    ``rhs_scale`` multiplies the right-hand side; it is only used to check
    linearity of the map from boundary data to coefficients.
    """
    prims = basis_primitives(params)
    cols = _columns(params, prims)
    M_exact = _boundary_rows(params, cols)
    b_exact = [v * _q(rhs_scale) for v in _rhs(params)]
    coeffs, cond = _refined_solve(M_exact, b_exact)
    A, B, C, D = (float(v) for v in coeffs)
    f = sum((col.scale(Fraction(v)) for col, v in zip(cols, (A, B, C, D))),
            LogLaurent.zero())
    sol = OdeSolution(params=params, A=A, B=B, C=C, D=D, f=f,
                      u1_A=prims[0], u1_B=prims[1], u2_A=prims[2], u2_B=prims[3],
                      condition_number=cond,
                      matrix=np.array([[float(v) for v in row] for row in M_exact]),
                      rhs=np.array([float(v) for v in b_exact]))
    sol.bc_residuals = boundary_residuals(sol, rhs_scale)
    if A <= 0 or B <= 0:
        raise NonPositiveAB(f"A={A:.6g}, B={B:.6g} not both positive", sol)
    return sol


def boundary_residuals(sol: OdeSolution, rhs_scale: Number = 1) -> tuple[float, ...]:
    params = sol.params
    lo, hi = params.lam, params.lam + 1
    df = sol.f.derivative()
    target = [v * _q(rhs_scale) for v in _rhs(params)]
    vals = [sol.f.evaluate_mp(lo), sol.f.evaluate_mp(hi),
            df.evaluate_mp(lo), df.evaluate_mp(hi)]
    return tuple(abs(float(v - mpmath.mpf(t.numerator) / t.denominator))
                 for v, t in zip(vals, target))


def ode_residual(sol: OdeSolution, nodes: int = 64) -> tuple[float, float]:
    """Max |x^2 f'' - m x f' + m f - Q| on Chebyshev nodes, and max |Q| there."""
    params = sol.params
    lam = float(params.lam)
    k = np.arange(nodes)
    x = lam + 0.5 + 0.5 * np.cos((2 * k + 1) * np.pi / (2 * nodes))
    f = sol.f
    df = f.derivative()
    ddf = df.derivative()
    Q = sol.Q()
    m = params.m
    res = x ** 2 * ddf(x) - m * x * df(x) + m * f(x) - Q(x)
    return float(np.max(np.abs(res))), float(np.max(np.abs(Q(x))))


# -- positivity ---------------------------------------------------------------

def _sign_changes(vals: np.ndarray) -> np.ndarray:
    s = np.sign(vals)
    return np.nonzero(s[:-1] * s[1:] < 0)[0]


def certify_positivity(sol: OdeSolution, params: RuledParams | None = None,
                       grid: int = POSITIVITY_GRID) -> PositivityCertificate:
    params = params or sol.params
    lo = float(params.lam)
    hi = lo + 1.0
    f = sol.f
    df = f.derivative()
    x = np.linspace(lo, hi, grid)
    fv = f(x)
    interior_min = float(np.min(fv[1:-1])) if grid > 2 else float("nan")

    # refine the f' sign-change count until it is stable under doubling
    count, prev, g = None, None, grid
    while True:
        xs = np.linspace(lo, hi, g)
        dv = df(xs)
        idx = _sign_changes(dv)
        count = len(idx)
        if count == prev or g >= 16 * grid:
            break
        prev, g = count, 2 * g
    crit = tuple(float(brentq(df, xs[i], xs[i + 1], xtol=1e-14)) for i in idx)

    d_lo, d_hi = float(df(lo)), float(df(hi))
    scale = max(1.0, abs(d_lo), abs(d_hi))
    ends_ok = (abs(float(f(lo))) <= 1e-8 * scale and abs(float(f(hi))) <= 1e-8 * scale)
    if count == 1 and d_lo > 0 and d_hi < 0 and ends_ok:
        return PositivityCertificate("proved-by-monotonicity", crit, interior_min)
    if interior_min > 0:
        return PositivityCertificate("verified-by-sampling", crit, interior_min)
    return PositivityCertificate("failed", crit, interior_min)


def solve(params: RuledParams) -> OdeSolution:
    """assemble_and_solve followed by the positivity certificate."""
    sol = assemble_and_solve(params)
    sol.positivity = certify_positivity(sol, params)
    return sol


# -- large-c behaviour ----------------------------------------------------------

def x_infinity(params: RuledParams) -> tuple[float, float, float, float]:
    m, lam = params.m, float(params.lam)
    return (2 * m * lam * (1 + lam), 2.0 * (m - 2), 2 * (1 + 2 * lam), 0.0)


def asymptotic_check(params_template: RuledParams,
                     c_list: Sequence[Number]) -> AsymptoticReport:
    cs = [float(c) for c in c_list]
    if len(cs) < 2 or any(b <= a for a, b in zip(cs, cs[1:])):
        raise ValueError("c_list needs at least two strictly increasing probes")
    n = params_template.n
    A, Bc, Cc, Dc = [], [], [], []
    for c in c_list:
        sol = assemble_and_solve(params_template.with_c(c))
        cf = float(c)
        A.append(sol.A)
        Bc.append(sol.B / cf)
        Cc.append(sol.C / cf ** (n - 1))
        Dc.append(sol.D / cf ** (n - 2))
    inv = 1.0 / np.array(cs)
    design = np.column_stack([np.ones_like(inv), inv])

    def intercept(vals):
        return float(np.linalg.lstsq(design, np.array(vals), rcond=None)[0][0])

    K_pairs = [(A[i] - A[i + 1]) / (inv[i] - inv[i + 1]) for i in range(len(cs) - 1)]
    xinf = x_infinity(params_template)
    fitted = (intercept(A), intercept(Bc), intercept(Cc))
    dev = max(abs(v - e) / abs(e) for v, e in zip(fitted, xinf[:3]))
    return AsymptoticReport(c_values=cs, A=A, B_over_c=Bc, C_over_cn1=Cc, D_over_cn2=Dc,
                            A_limit=fitted[0], B_slope=fitted[1], C_slope=fitted[2],
                            D_bound=float(max(abs(v) for v in Dc)), K_pairs=K_pairs,
                            x_infty_expected=xinf, max_relative_deviation=dev)


def accepted(params: RuledParams) -> bool:
    try:
        sol = solve(params)
    except SolverError:
        return False
    return sol.positivity.mode == "proved-by-monotonicity"


def scan_threshold(params_template: RuledParams, c_range: tuple[float, float],
                   probes: int = 40, bisect_steps: int = 30) -> ScanResult:
    """Smallest accepted c on a uniform probe grid, sharpened by bisection.

    Acceptance is not assumed monotone in c, so the full verdict vector is
    returned; bisection only runs between the first accepted probe and the
    rejected probe just below it.
    """
    lo, hi = (float(v) for v in c_range)
    if not (0 < lo < hi):
        raise ValueError("c_range must be a positive, non-empty interval")
    grid = list(np.linspace(lo, hi, probes))
    verdicts = [accepted(params_template.with_c(c)) for c in grid]
    if not any(verdicts):
        raise NoAcceptableC(f"no acceptable c in [{lo}, {hi}]")
    k = verdicts.index(True)
    c_star = grid[k]
    if k == 0:
        return ScanResult(c_star, grid, verdicts, refined=False)
    bad, good = grid[k - 1], grid[k]
    for _ in range(bisect_steps):
        mid = 0.5 * (bad + good)
        if accepted(params_template.with_c(mid)):
            good = mid
        else:
            bad = mid
    return ScanResult(good, grid, verdicts, refined=True)


def solution_to_dict(sol: OdeSolution) -> dict:
    ode_max, q_max = ode_residual(sol)
    out = {
        "params": sol.params.to_dict(),
        "A": sol.A, "B": sol.B, "C": sol.C, "D": sol.D,
        "f": sol.f.to_text(),
        "condition_number": sol.condition_number,
        "residuals": {"bc": list(sol.bc_residuals), "ode_max": ode_max, "q_max": q_max},
    }
    if sol.positivity is not None:
        out["positivity"] = sol.positivity.to_dict()
    return out
