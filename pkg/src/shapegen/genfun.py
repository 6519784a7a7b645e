"""Generating functions of regexes and Boltzmann-parameter tuning.

All symbolic arithmetic is exact (arbitrary-precision rationals);
floating point enters only in root finding (`convergence_radius`,
`tune_z`) and final evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .sexpr import Atom, Concat, Epsilon, RegexNode, Star, Union, nullable

__all__ = [
    "Polynomial", "RationalFunction", "TunedParams", "TuneError",
    "generating_function", "taylor_coefficients", "convergence_radius",
    "mean_length_function", "tune_z", "tuning_polynomial",
]

NEG_INF = float("-inf")


class TuneError(ValueError):
    """Requested mean length is outside the reachable range."""


class Polynomial:
    """Dense polynomial in z with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((1,))

    @classmethod
    def z(cls) -> "Polynomial":
        return cls((0, 1))

    @property
    def degree(self):
        """Degree, with -inf for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial(tuple(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return Polynomial.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(c * i for i, c in enumerate(self.coeffs) if i > 0))

    def __call__(self, z):
        """Horner evaluation; exact for Fraction input, float otherwise."""
        acc = Fraction(0) if isinstance(z, Fraction) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * z + (c if isinstance(z, Fraction) else float(c))
        return acc

    def divmod(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        den = other.coeffs
        dd = len(den) - 1
        lead = den[-1]
        if len(rem) - 1 < dd:
            return Polynomial.zero(), Polynomial(rem)
        quot = [Fraction(0)] * (len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            q = c / lead
            quot[i - dd] = q
            for j, d in enumerate(den):
                rem[i - dd + j] -= q * d
        return Polynomial(quot), Polynomial(rem)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return Polynomial(tuple(c / lead for c in self.coeffs))

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero():
            _, r = a.divmod(b)
            a, b = b, r
        return a.monic() if not a.is_zero() else Polynomial.one()

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]})"


class RationalFunction:
    """Reduced ratio of two polynomials, normalized so den(0) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = Polynomial.zero()
            self.den = Polynomial.one()
            return
        g = num.gcd(den)
        if g.degree > 0:
            num, _ = num.divmod(g)
            den, _ = den.divmod(g)
        c0 = den(Fraction(0))
        if c0 == 0:
            raise ValueError("denominator vanishes at z=0 after reduction "
                             "(series has no expansion at the origin)")
        self.num = num * (1 / c0)
        self.den = den * (1 / c0)

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls(Polynomial.zero(), Polynomial.one())

    @classmethod
    def one(cls) -> "RationalFunction":
        return cls(Polynomial.one(), Polynomial.one())

    @classmethod
    def z(cls) -> "RationalFunction":
        return cls(Polynomial.z(), Polynomial.one())

    def __eq__(self, other):
        return (isinstance(other, RationalFunction)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.num * other.den - other.num * self.den,
                                self.den * other.den)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def derivative(self) -> "RationalFunction":
        p, q = self.num, self.den
        return RationalFunction(p.derivative() * q - p * q.derivative(), q * q)

    def __call__(self, z):
        num = self.num(z)
        den = self.den(z)
        if isinstance(z, Fraction):
            return num / den
        return num / den if den != 0 else math.inf

    def __repr__(self):
        return f"RationalFunction({self.num!r}, {self.den!r})"


@dataclass(frozen=True)
class TunedParams:
    z: float
    rconv: float
    mean_length_at_z: float


# ---------------------------------------------------------------------------
# Generating function of a regex
# ---------------------------------------------------------------------------

def generating_function(regex: RegexNode) -> RationalFunction:
    """Counting series of the regex: the z^n coefficient is the number of
    words of length n, provided the regex is unambiguous."""
    memo: dict[int, RationalFunction] = {}

    def go(n: RegexNode) -> RationalFunction:
        if id(n) in memo:
            return memo[id(n)]
        if isinstance(n, Epsilon):
            g = RationalFunction.one()
        elif isinstance(n, Atom):
            g = RationalFunction.z()
        elif isinstance(n, Concat):
            g = go(n.left) * go(n.right)
        elif isinstance(n, Union):
            g = go(n.left) + go(n.right)
        elif isinstance(n, Star):
            if nullable(n.inner):
                raise ValueError("nullable star argument: 1/(1 - g) diverges")
            g = RationalFunction.one() / (RationalFunction.one() - go(n.inner))
        else:
            raise TypeError(f"not a regex node: {n!r}")
        memo[id(n)] = g
        return g

    return go(regex)


def taylor_coefficients(g: RationalFunction, n: int) -> list[int]:
    """First n+1 power-series coefficients, by linear recurrence.

    Exact; raises if a coefficient is not an integer (a counting series
    always yields integers).
    """
    p = g.num.coeffs
    q = g.den.coeffs  # q[0] == 1 by normalization
    out: list[Fraction] = []
    for k in range(n + 1):
        c = p[k] if k < len(p) else Fraction(0)
        for j in range(1, min(k, len(q) - 1) + 1):
            c -= q[j] * out[k - j]
        out.append(c)
    ints = []
    for c in out:
        if c.denominator != 1:
            raise ValueError(f"non-integer series coefficient {c}; not a counting series")
        ints.append(int(c))
    return ints


# ---------------------------------------------------------------------------
# Convergence radius and mean-length tuning
# ---------------------------------------------------------------------------

def _float_eval(poly: Polynomial, x: float) -> float:
    acc = 0.0
    for c in reversed(poly.coeffs):
        acc = acc * x + float(c)
        if math.isinf(acc):
            return acc
    return acc


def _bisect(f, lo: float, hi: float, tol: float) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (flo < 0) == (fm < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)

_SCAN_MAX = 1e15
_SCAN_SUBDIV = 128


def convergence_radius(g: RationalFunction) -> float:
    """Smallest positive real root of the denominator, or +inf.

    For a series with nonnegative coefficients the dominant singularity
    lies on the positive axis, so scanning the denominator's square-free
    part for a sign change and bisecting to 1e-12 locates it; the
    square-free step guarantees every real root produces a sign change.
    """
    den = g.den
    if den.degree <= 0:
        return math.inf
    sf, _ = den.divmod(den.gcd(den.derivative()))
    if sf.degree <= 0:
        return math.inf

    def f(x: float) -> float:
        return _float_eval(sf, x)

    lo = 0.0
    width = 1e-3
    while lo < _SCAN_MAX:
        hi = lo + width
        prev_t, prev_v = lo, f(lo)
        for i in range(1, _SCAN_SUBDIV + 1):
            t = lo + width * i / _SCAN_SUBDIV
            v = f(t)
            if v == 0.0:
                return t
            if (prev_v < 0) != (v < 0):
                return _bisect(f, prev_t, t, 1e-12)
            prev_t, prev_v = t, v
        lo = hi
        width *= 2
    return math.inf


def mean_length_function(g: RationalFunction) -> RationalFunction:
    """Expected word length as a function of z: z * g'(z) / g(z)."""
    p, q = g.num, g.den
    num = Polynomial.z() * (p.derivative() * q - p * q.derivative())
    den = p * q
    return RationalFunction(num, den)


def tuning_polynomial(nz: RationalFunction, target_mean: float) -> Polynomial:
    """N*q(z) - p(z) for N_z = p/q; its root in (0, Rconv) is the tuned z."""
    t = Fraction(target_mean)
    return nz.den * t - nz.num

_GRID = 1000


def tune_z(g: RationalFunction, target_mean: float) -> TunedParams:
    """Boltzmann parameter z with mean word length equal to target_mean.

    Bisects N_z = target on [0, Rconv); a pre-scan over a 1000-point
    grid asserts that N_z is nondecreasing there, which the bisection
    relies on.
    """
    rconv = convergence_radius(g)
    nz = mean_length_function(g)
    n0 = float(nz.num(Fraction(0)))  # N at z=0: length of the shortest word
    if target_mean < n0 - 1e-12:
        raise TuneError(f"unreachable mean length {target_mean}: "
                        f"shortest word has length {n0:g}")
    if abs(target_mean - n0) <= 1e-12:
        return TunedParams(0.0, rconv, n0)

    if math.isinf(rconv):
        zhi = 1.0
        while nz(zhi) < target_mean:
            zhi *= 2.0
            if zhi > 1e18:
                raise TuneError(f"unreachable mean length {target_mean}")
    else:
        zhi = rconv * (1.0 - 1e-9)  # guard: never evaluate at the pole

    grid = [nz(zhi * i / _GRID) for i in range(_GRID + 1)]
    for a, b in zip(grid, grid[1:]):
        if b < a - 1e-9 * max(1.0, abs(a)):
            raise RuntimeError(
                "mean-length function is not monotone on (0, Rconv); "
                "bisection tuning is unsound for this expression")
    if grid[-1] < target_mean:
        raise TuneError(f"unreachable mean length {target_mean}: "
                        f"supremum near Rconv is {grid[-1]:g}")

    z = _bisect(lambda x: nz(x) - target_mean, 0.0, zhi, 1e-9)
    return TunedParams(z, rconv, nz(z))
