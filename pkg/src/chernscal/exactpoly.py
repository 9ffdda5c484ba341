"""Exact calculus on Laurent polynomials with a polynomial logarithmic part.

Elements have the form ``sum_k q_k x^k + (sum_j r_j x^j) ln(x)`` on x > 0 with
exact rational coefficients. The class is closed under addition,
differentiation, multiplication by a Laurent polynomial, and (for log-free
inputs) antidifferentiation, which is all the ruled-manifold ODE needs.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

Rational = Fraction
Number = Union[int, Fraction, float]


class LogClassError(ValueError):
    """Raised when an operation would leave the Laurent-plus-log class."""


def _coerce(v: Number) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise ValueError(f"non-finite coefficient {v!r}")
        return Fraction(float(v))
    return Fraction(v)


def _clean(terms: Mapping[int, Number] | None) -> tuple[tuple[int, Fraction], ...]:
    out: dict[int, Fraction] = {}
    for k, v in (terms or {}).items():
        q = _coerce(v)
        if q:
            out[int(k)] = out.get(int(k), Fraction(0)) + q
    return tuple(sorted((k, v) for k, v in out.items() if v))


class LogLaurent:
    """Immutable element ``sum q_k x^k + (sum r_j x^j) ln x``.

    ``laurent`` maps integer exponents to coefficients, ``log`` maps
    non-negative exponents to coefficients of ``x^j ln x``.
    """

    __slots__ = ("_laurent", "_log", "_float_cache")

    def __init__(self, laurent: Mapping[int, Number] | None = None,
                 log: Mapping[int, Number] | None = None):
        lt = _clean(laurent)
        gt = _clean(log)
        if any(j < 0 for j, _ in gt):
            raise LogClassError("log part must have non-negative exponents")
        object.__setattr__(self, "_laurent", lt)
        object.__setattr__(self, "_log", gt)
        object.__setattr__(self, "_float_cache", None)

    def __setattr__(self, name, value):
        raise AttributeError("LogLaurent is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> "LogLaurent":
        return cls()

    @classmethod
    def const(cls, c: Number) -> "LogLaurent":
        return cls({0: c})

    @classmethod
    def monomial(cls, k: int, coef: Number = 1) -> "LogLaurent":
        return cls({k: coef})

    @classmethod
    def log_monomial(cls, j: int, coef: Number = 1) -> "LogLaurent":
        return cls(log={j: coef})

    @classmethod
    def x(cls) -> "LogLaurent":
        return cls({1: 1})

    # -- views --------------------------------------------------------------
    @property
    def laurent_terms(self) -> dict[int, Fraction]:
        return dict(self._laurent)

    @property
    def log_terms(self) -> dict[int, Fraction]:
        return dict(self._log)

    @property
    def has_log(self) -> bool:
        return bool(self._log)

    def is_zero(self) -> bool:
        return not self._laurent and not self._log

    def min_exponent(self) -> int | None:
        ks = [k for k, _ in self._laurent] + [j for j, _ in self._log]
        return min(ks) if ks else None

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "LogLaurent":
        other = _as_element(other)
        if other is NotImplemented:
            return NotImplemented
        lt = dict(self._laurent)
        for k, v in other._laurent:
            lt[k] = lt.get(k, 0) + v
        gt = dict(self._log)
        for j, v in other._log:
            gt[j] = gt.get(j, 0) + v
        return LogLaurent(lt, gt)

    __radd__ = __add__

    def __neg__(self) -> "LogLaurent":
        return LogLaurent({k: -v for k, v in self._laurent},
                          {j: -v for j, v in self._log})

    def __sub__(self, other) -> "LogLaurent":
        other = _as_element(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LogLaurent":
        return (-self) + other

    def scale(self, s: Number) -> "LogLaurent":
        s = _coerce(s)
        return LogLaurent({k: s * v for k, v in self._laurent},
                          {j: s * v for j, v in self._log})

    def __mul__(self, other) -> "LogLaurent":
        if isinstance(other, (int, Fraction, float, np.integer, np.floating)):
            return self.scale(other)
        other = _as_element(other)
        if other is NotImplemented:
            return NotImplemented
        if self.has_log and other.has_log:
            raise LogClassError("product of two log-carrying elements leaves the class")
        if other.has_log:
            self, other = other, self
        lt: dict[int, Fraction] = {}
        for k1, v1 in self._laurent:
            for k2, v2 in other._laurent:
                lt[k1 + k2] = lt.get(k1 + k2, 0) + v1 * v2
        gt: dict[int, Fraction] = {}
        for j, v1 in self._log:
            for k2, v2 in other._laurent:
                if j + k2 < 0:
                    raise LogClassError("log part would acquire a negative exponent")
                gt[j + k2] = gt.get(j + k2, 0) + v1 * v2
        return LogLaurent(lt, gt)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = _as_element(other)
        if other is NotImplemented:
            return NotImplemented
        return self._laurent == other._laurent and self._log == other._log

    def __hash__(self) -> int:
        return hash((self._laurent, self._log))

    # -- calculus -------------------------------------------------------------
    def derivative(self) -> "LogLaurent":
        lt: dict[int, Fraction] = {}
        for k, v in self._laurent:
            if k:
                lt[k - 1] = lt.get(k - 1, 0) + k * v
        gt: dict[int, Fraction] = {}
        for j, v in self._log:
            # d/dx (x^j ln x) = j x^(j-1) ln x + x^(j-1)
            lt[j - 1] = lt.get(j - 1, 0) + v
            if j:
                gt[j - 1] = gt.get(j - 1, 0) + j * v
        return LogLaurent(lt, gt)

    def antiderivative(self) -> "LogLaurent":
        """Primitive with zero constant of integration (log-free input only)."""
        if self.has_log:
            raise LogClassError("antiderivative is defined for log-free elements only")
        lt: dict[int, Fraction] = {}
        gt: dict[int, Fraction] = {}
        for k, v in self._laurent:
            if k == -1:
                gt[0] = v
            else:
                lt[k + 1] = v / (k + 1)
        return LogLaurent(lt, gt)

    # -- evaluation -----------------------------------------------------------
    def _floats(self):
        fc = self._float_cache
        if fc is None:
            fc = ([(k, float(v)) for k, v in self._laurent],
                  [(j, float(v)) for j, v in self._log])
            object.__setattr__(self, "_float_cache", fc)
        return fc

    def __call__(self, x):
        if np.ndim(x) == 0 and not isinstance(x, np.ndarray):
            return evaluate(self, x)
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise ValueError("LogLaurent is defined on x > 0 only")
        lt, gt = self._floats()
        out = np.zeros_like(x)
        for k, v in lt:
            out += v * x ** k
        if gt:
            lp = np.zeros_like(x)
            for j, v in gt:
                lp += v * x ** j
            out += lp * np.log(x)
        return out

    def evaluate_mp(self, x: Number, dps: int = 50):
        """High-precision value as an ``mpmath.mpf``."""
        import mpmath

        if x <= 0:
            raise ValueError("LogLaurent is defined on x > 0 only")
        with mpmath.workdps(dps):
            xr = _coerce(x)
            xm = mpmath.mpf(xr.numerator) / xr.denominator
            total = mpmath.mpf(0)
            for k, v in self._laurent:
                total += (mpmath.mpf(v.numerator) / v.denominator) * xm ** k
            if self._log:
                lp = mpmath.mpf(0)
                for j, v in self._log:
                    lp += (mpmath.mpf(v.numerator) / v.denominator) * xm ** j
                total += lp * mpmath.log(xm)
            return +total

    # -- text form ------------------------------------------------------------
    def to_text(self) -> str:
        if self.is_zero():
            return "0"
        parts = [f"{v}*x^{k}" for k, v in self._laurent]
        if self._log:
            inner = " + ".join(f"{v}*x^{j}" for j, v in self._log)
            parts.append(f"({inner})*ln(x)")
        return " + ".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "LogLaurent":
        text = text.strip()
        if text == "0":
            return cls()
        log_part = {}
        m = re.search(r"\(([^()]*)\)\*ln\(x\)$", text)
        if m:
            log_part = _parse_terms(m.group(1))
            text = text[: m.start()].rstrip()
            if text.endswith("+"):
                text = text[:-1].rstrip()
        lau = _parse_terms(text) if text else {}
        return cls(lau, log_part)

    def __repr__(self) -> str:
        return f"LogLaurent({self.to_text()!r})"

    __str__ = to_text


_TERM = re.compile(r"^\s*(-?\d+(?:/\d+)?)\*x\^(-?\d+)\s*$")


def _parse_terms(s: str) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for chunk in s.split(" + "):
        m = _TERM.match(chunk)
        if not m:
            raise ValueError(f"malformed term {chunk!r}")
        out[int(m.group(2))] = Fraction(m.group(1))
    return out


def _as_element(v):
    if isinstance(v, LogLaurent):
        return v
    if isinstance(v, (int, Fraction, float, np.integer, np.floating)):
        return LogLaurent.const(v)
    return NotImplemented


# -- functional surface ---------------------------------------------------------

def add(f: LogLaurent, g: LogLaurent) -> LogLaurent:
    return f + g


def mul_laurent(f: LogLaurent, p: LogLaurent) -> LogLaurent:
    if f.has_log and p.has_log:
        raise LogClassError("product of two log-carrying elements leaves the class")
    return f * p


def derivative(f: LogLaurent) -> LogLaurent:
    return f.derivative()


def antiderivative(p: LogLaurent) -> LogLaurent:
    return p.antiderivative()


def evaluate(f: LogLaurent, x: Number) -> float:
    """Value of ``f`` at ``x > 0``.

    Exact rational arithmetic is used for log-free polynomials at rational
    points; everything else goes through compensated float summation.
    """
    if x <= 0:
        raise ValueError("LogLaurent is defined on x > 0 only")
    rational_x = isinstance(x, (int, Fraction, np.integer))
    if rational_x and not f.has_log and (f.min_exponent() or 0) >= 0:
        xr = _coerce(x)
        return float(sum((v * xr ** k for k, v in f._laurent), Fraction(0)))
    xf = float(x)
    lt, gt = f._floats()
    total = math.fsum(v * xf ** k for k, v in lt)
    if gt:
        total += math.fsum(v * xf ** j for j, v in gt) * math.log(xf)
    return total


def poly_pow(p: Number, q: Number, exponent: int) -> LogLaurent:
    """Binomial expansion of ``(p x + q)^exponent``."""
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    p, q = _coerce(p), _coerce(q)
    return LogLaurent({k: math.comb(exponent, k) * p ** k * q ** (exponent - k)
                       for k in range(exponent + 1)})
