"""Truncated formal power series in one variable.

Two coefficient modes are supported:

``exact``
    Coefficients are :class:`fractions.Fraction`; every operation is exact.
``float``
    Coefficients are IEEE doubles held in a read-only numpy array.  Products
    are direct convolutions (each coefficient is one dot product, error
    bounded by ``n * eps * sum |a_k b_{n-k}|``).  The recurrences used by
    ``exp``, ``log``, ``sqrt`` and ``inverse`` are forward recurrences with
    the same per-step bound.  Evaluation uses compensated summation
    (:func:`math.fsum`).

A series of order ``N`` stores ``c_0 .. c_N``; ``O(z^{N+1})`` is discarded.
Series are immutable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, UsageError

EXACT = "exact"
FLOAT = "float"

DEFAULT_TAIL_TOLERANCE = 1e-10


def _is_exact_scalar(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def _exact_sqrt(q: Fraction) -> Fraction:
    q = Fraction(q)
    if q < 0:
        raise DomainError(f"square root of negative number {q}")
    p, r = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if p * p != q.numerator or r * r != q.denominator:
        raise DomainError(f"constant term {q} is not the square of a rational")
    return Fraction(p, r)


class EvalResult(NamedTuple):
    value: float
    tail: float  # geometric estimate of the discarded tail
    ratio: float  # last per-index term ratio used for the estimate
    flagged: bool  # tail estimate above tolerance, or divergence
    diverged: bool  # ratio >= 1 at truncation

    def __float__(self):
        return float(self.value)


class TruncatedSeries:
    __slots__ = ("_c", "mode")

    def __init__(self, coeffs: Sequence, mode: str | None = None, order: int | None = None):
        if isinstance(coeffs, TruncatedSeries):
            mode = mode or coeffs.mode
            coeffs = list(coeffs._c)
        if mode is None:
            if isinstance(coeffs, np.ndarray):
                mode = FLOAT
            else:
                mode = EXACT if all(_is_exact_scalar(c) for c in coeffs) else FLOAT
        if mode not in (EXACT, FLOAT):
            raise UsageError(f"unknown coefficient mode {mode!r}")
        n = len(coeffs) - 1 if order is None else order
        if n < 0:
            raise UsageError("a series needs at least the constant coefficient")
        if mode == EXACT:
            c = [Fraction(x) for x in list(coeffs)[: n + 1]]
            c.extend([Fraction(0)] * (n + 1 - len(c)))
            self._c = tuple(c)
        else:
            arr = np.zeros(n + 1)
            src = np.asarray(coeffs, dtype=float)[: n + 1]
            arr[: len(src)] = src
            arr.flags.writeable = False
            self._c = arr
        self.mode = mode

    # -- construction helpers -------------------------------------------------

    @classmethod
    def _raw(cls, c, mode):
        s = cls.__new__(cls)
        if mode == FLOAT:
            c = np.asarray(c, dtype=float)
            c.flags.writeable = False
        else:
            c = tuple(c)
        s._c = c
        s.mode = mode
        return s

    @classmethod
    def zero(cls, order: int, mode: str = EXACT) -> "TruncatedSeries":
        return cls([0], mode=mode, order=order)

    @classmethod
    def constant(cls, value, order: int, mode: str = EXACT) -> "TruncatedSeries":
        return cls([value], mode=mode, order=order)

    @classmethod
    def variable(cls, order: int, mode: str = EXACT) -> "TruncatedSeries":
        return cls([0, 1], mode=mode, order=order)

    @classmethod
    def geometric(cls, order: int, mode: str = EXACT) -> "TruncatedSeries":
        return cls([1] * (order + 1), mode=mode)

    # -- basic accessors ------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coeffs(self):
        """Coefficients ``c_0..c_N`` (tuple of Fractions or read-only array)."""
        return self._c

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    def __len__(self):
        return len(self._c)

    def __getitem__(self, n):
        return self._c[n]

    def __iter__(self):
        return iter(self._c)

    def __repr__(self):
        shown = ", ".join(str(c) for c in list(self._c[:6]))
        more = ", ..." if self.order >= 6 else ""
        return f"TruncatedSeries([{shown}{more}], mode={self.mode!r}, order={self.order})"

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.mode != other.mode or self.order != other.order:
            return False
        if self.exact:
            return self._c == other._c
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash((self.mode, tuple(self._c)))

    def _zero(self):
        return Fraction(0) if self.exact else 0.0

    def _check(self, other: "TruncatedSeries"):
        if not isinstance(other, TruncatedSeries):
            raise UsageError(f"expected a TruncatedSeries, got {type(other).__name__}")
        if other.mode != self.mode:
            raise UsageError(f"coefficient mode mismatch: {self.mode} vs {other.mode}")

    def _scalar(self, x):
        if isinstance(x, TruncatedSeries):
            raise TypeError
        if self.exact:
            if not _is_exact_scalar(x):
                raise UsageError("exact-mode series only accept rational scalars")
            return Fraction(x)
        return float(x)

    def to_float(self) -> "TruncatedSeries":
        if not self.exact:
            return self
        return TruncatedSeries._raw([float(c) for c in self._c], FLOAT)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order == self.order:
            return self
        return TruncatedSeries(self._c, mode=self.mode, order=order)

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = list(self._c) if self.exact else self._c.copy()
            c[0] = c[0] + self._scalar(other)
            return TruncatedSeries._raw(c, self.mode)
        self._check(other)
        m = min(self.order, other.order)
        if self.exact:
            return TruncatedSeries._raw([x + y for x, y in zip(self._c[: m + 1], other._c)], EXACT)
        return TruncatedSeries._raw(self._c[: m + 1] + other._c[: m + 1], FLOAT)

    __radd__ = __add__

    def __neg__(self):
        if self.exact:
            return TruncatedSeries._raw([-x for x in self._c], EXACT)
        return TruncatedSeries._raw(-self._c, FLOAT)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        k = self._scalar(other)
        if self.exact:
            return TruncatedSeries._raw([k * x for x in self._c], EXACT)
        return TruncatedSeries._raw(k * self._c, FLOAT)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other.inverse())
        k = self._scalar(other)
        if k == 0:
            raise ZeroDivisionError("series divided by zero")
        return self * (1 / k)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise UsageError("only nonnegative integer powers are supported")
        result = TruncatedSeries.constant(1, self.order, self.mode)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus and substitutions -------------------------------------------

    def derivative(self) -> "TruncatedSeries":
        n = self.order
        if n == 0:
            return TruncatedSeries.zero(0, self.mode)
        if self.exact:
            c = [k * self._c[k] for k in range(1, n + 1)]
        else:
            c = np.arange(1, n + 1) * self._c[1:]
        return TruncatedSeries._raw(c, self.mode)

    def integral(self) -> "TruncatedSeries":
        """Antiderivative with zero constant term, same order."""
        n = self.order
        if self.exact:
            c = [Fraction(0)] + [self._c[k - 1] / k for k in range(1, n + 1)]
        else:
            c = np.concatenate(([0.0], self._c[:n] / np.arange(1, n + 1)))
        return TruncatedSeries._raw(c, self.mode)

    def point(self) -> "TruncatedSeries":
        return point(self)

    def substitute_power(self, k: int) -> "TruncatedSeries":
        return substitute_power(self, k)

    def dilate(self, factor) -> "TruncatedSeries":
        """The series ``a(factor * z)``: coefficient ``n`` is scaled by ``factor**n``."""
        if self.exact:
            f = self._scalar(factor)
            p, c = Fraction(1), []
            for x in self._c:
                c.append(x * p)
                p *= f
            return TruncatedSeries._raw(c, EXACT)
        f = float(factor)
        with np.errstate(under="ignore"):
            powers = f ** np.arange(self.order + 1, dtype=float)
        return TruncatedSeries._raw(self._c * powers, FLOAT)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by ``z**k`` (k >= 0), keeping the order."""
        if k < 0:
            raise UsageError("shift amount must be nonnegative")
        z = self._zero()
        c = [z] * k + list(self._c[: self.order + 1 - k])
        return TruncatedSeries(c, mode=self.mode, order=self.order)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(z))`` by Horner's rule; ``inner`` must vanish at 0."""
        self._check(inner)
        if inner[0] != 0:
            raise DomainError("composition needs an inner series with zero constant term")
        order = min(self.order, inner.order)
        inner = inner.truncate(order)
        acc = TruncatedSeries.constant(self._c[order], order, self.mode)
        for k in range(order - 1, -1, -1):
            acc = mul(acc, inner) + self._c[k]
        return acc

    # -- transcendental operations --------------------------------------------

    def inverse(self) -> "TruncatedSeries":
        a = self._c
        if a[0] == 0:
            raise DomainError("reciprocal of a series with zero constant term")
        n = self.order
        if self.exact:
            inv0 = 1 / a[0]
            b = [inv0]
            for m in range(1, n + 1):
                s = sum(a[k] * b[m - k] for k in range(1, m + 1))
                b.append(-s * inv0)
            return TruncatedSeries._raw(b, EXACT)
        b = np.zeros(n + 1)
        b[0] = 1.0 / a[0]
        for m in range(1, n + 1):
            b[m] = -np.dot(a[1 : m + 1], b[m - 1 :: -1][:m]) * b[0]
        return TruncatedSeries._raw(b, FLOAT)

    def exp(self) -> "TruncatedSeries":
        return exp(self)

    def log(self) -> "TruncatedSeries":
        return log(self)

    def sqrt(self) -> "TruncatedSeries":
        return sqrt(self)

    def eval_at(self, x, tolerance: float = DEFAULT_TAIL_TOLERANCE) -> EvalResult:
        return eval_at(self, x, tolerance)


def _coerce_pair(a: TruncatedSeries, b: TruncatedSeries):
    if not isinstance(a, TruncatedSeries) or not isinstance(b, TruncatedSeries):
        raise UsageError("mul expects two TruncatedSeries")
    if a.mode != b.mode:
        raise UsageError(f"coefficient mode mismatch: {a.mode} vs {b.mode}")


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at ``min(order(a), order(b))``."""
    _coerce_pair(a, b)
    m = min(a.order, b.order)
    if a.mode == FLOAT:
        return TruncatedSeries._raw(np.convolve(a._c[: m + 1], b._c[: m + 1])[: m + 1], FLOAT)
    x = a._c[: m + 1]
    y = b._c[: m + 1]
    # skip leading zeros; valuations are common (e.g. series in z^2)
    lo_x = next((i for i, v in enumerate(x) if v), m + 1)
    lo_y = next((i for i, v in enumerate(y) if v), m + 1)
    nz_x = [(i, v) for i, v in enumerate(x) if v]
    out = [Fraction(0)] * (m + 1)
    for n in range(lo_x + lo_y, m + 1):
        s = Fraction(0)
        for i, v in nz_x:
            if i > n - lo_y:
                break
            w = y[n - i]
            if w:
                s += v * w
        out[n] = s
    return TruncatedSeries._raw(out, EXACT)


def exp(a: TruncatedSeries) -> TruncatedSeries:
    """Series exponential through ``(exp a)' = a' exp a``."""
    c = a._c
    if c[0] != 0:
        raise DomainError("exp needs a series with zero constant term")
    n = a.order
    if a.exact:
        ka = [k * c[k] for k in range(n + 1)]
        nz = [k for k in range(1, n + 1) if ka[k]]
        f = [Fraction(1)]
        for m in range(1, n + 1):
            s = Fraction(0)
            for k in nz:
                if k > m:
                    break
                s += ka[k] * f[m - k]
            f.append(s / m)
        return TruncatedSeries._raw(f, EXACT)
    ka = np.arange(n + 1) * c
    f = np.zeros(n + 1)
    f[0] = 1.0
    for m in range(1, n + 1):
        f[m] = np.dot(ka[1 : m + 1], f[m - 1 :: -1][:m]) / m
    return TruncatedSeries._raw(f, FLOAT)


def log(a: TruncatedSeries) -> TruncatedSeries:
    """Logarithm; exact mode needs ``c_0 = 1``, float mode ``c_0 > 0``."""
    c = a._c
    n = a.order
    if a.exact:
        if c[0] != 1:
            raise DomainError("exact log needs constant term 1")
        out = [Fraction(0)]
        for m in range(1, n + 1):
            s = m * c[m] - sum(k * out[k] * c[m - k] for k in range(1, m))
            out.append(s / m)
        return TruncatedSeries._raw(out, EXACT)
    if not c[0] > 0:
        raise DomainError("log needs a positive constant term")
    out = np.zeros(n + 1)
    out[0] = math.log(c[0])
    kl = np.zeros(n + 1)
    for m in range(1, n + 1):
        s = m * c[m] - np.dot(kl[1:m], c[m - 1 : 0 : -1][: m - 1])
        out[m] = s / (m * c[0])
        kl[m] = m * out[m]
    return TruncatedSeries._raw(out, FLOAT)


def sqrt(a: TruncatedSeries) -> TruncatedSeries:
    """Principal square root (positive constant term)."""
    c = a._c
    n = a.order
    if a.exact:
        if not c[0] > 0:
            raise DomainError("sqrt needs a positive constant term")
        b0 = _exact_sqrt(c[0])
        inv = 1 / (2 * b0)
        b = [b0]
        for m in range(1, n + 1):
            s = sum(b[k] * b[m - k] for k in range(1, m))
            b.append((c[m] - s) * inv)
        return TruncatedSeries._raw(b, EXACT)
    if not c[0] > 0:
        raise DomainError("sqrt needs a positive constant term")
    b = np.zeros(n + 1)
    b[0] = math.sqrt(c[0])
    inv = 0.5 / b[0]
    for m in range(1, n + 1):
        s = np.dot(b[1:m], b[m - 1 : 0 : -1][: m - 1]) if m > 1 else 0.0
        b[m] = (c[m] - s) * inv
    return TruncatedSeries._raw(b, FLOAT)


def substitute_power(a: TruncatedSeries, k: int) -> TruncatedSeries:
    """``a(z**k)`` at the same order."""
    if not isinstance(k, int) or k < 1:
        raise UsageError("substitute_power needs a positive integer exponent")
    if k == 1:
        return a
    n = a.order
    if a.exact:
        out = [Fraction(0)] * (n + 1)
        for i in range(n // k + 1):
            out[i * k] = a._c[i]
        return TruncatedSeries._raw(out, EXACT)
    out = np.zeros(n + 1)
    out[::k] = a._c[: n // k + 1]
    return TruncatedSeries._raw(out, FLOAT)


def point(a: TruncatedSeries) -> TruncatedSeries:
    """``z * a'(z)``: coefficient ``n`` becomes ``n * c_n``."""
    if a.exact:
        return TruncatedSeries._raw([k * x for k, x in enumerate(a._c)], EXACT)
    return TruncatedSeries._raw(np.arange(a.order + 1) * a._c, FLOAT)


def eval_at(a: TruncatedSeries, x, tolerance: float = DEFAULT_TAIL_TOLERANCE) -> EvalResult:
    """Partial sum at ``x >= 0`` plus a geometric tail estimate.

    The estimate uses the ratio between the last two nonzero retained terms
    (normalised per index, so sparse series such as ``a(z^2)`` work).  It is
    reported, never added to the value.
    """
    if x < 0:
        raise DomainError("eval_at expects a nonnegative point")
    exact_x = a.exact and _is_exact_scalar(x)
    if x == 0:
        v = a._c[0] if exact_x else float(a._c[0])
        return EvalResult(v, 0.0, 0.0, False, False)
    if exact_x:
        terms = []
        p = Fraction(1)
        for c in a._c:
            terms.append(c * p)
            p *= x
        value = sum(terms, Fraction(0))
        fterms = [float(t) for t in terms]
    else:
        xf = float(x)
        c = np.asarray(a._c, dtype=float)
        with np.errstate(under="ignore", over="ignore"):
            logs = np.arange(len(c)) * math.log(xf)
            fterms = (c * np.exp(logs)).tolist()
        value = math.fsum(fterms)
    nz = [i for i, t in enumerate(fterms) if t != 0.0]
    ratio, tail, diverged = 0.0, 0.0, False
    if len(nz) >= 2:
        j, i = nz[-1], nz[-2]
        q = abs(fterms[j] / fterms[i])
        ratio = q ** (1.0 / (j - i))
        if q >= 1.0 or not math.isfinite(q):
            diverged, tail = True, math.inf
        else:
            tail = abs(fterms[j]) * q / (1.0 - q)
    flagged = diverged or tail > tolerance * max(1.0, abs(float(value)))
    return EvalResult(value, tail, ratio, flagged, diverged)
