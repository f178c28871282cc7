"""Exact rationals (gmpy2.mpq) and Gaussian rationals, plus small matrix helpers."""

import re
from fractions import Fraction

from gmpy2 import mpq, isqrt

from .errors import IrrationalScalingError, ValidationError

ZERO = mpq(0)
ONE = mpq(1)

_RAT = re.compile(r"^(-?)(0|[1-9][0-9]*)/([1-9][0-9]*)$")


def to_q(x):
    """Coerce int, mpq, Fraction or a 'p/q' string to mpq. Floats are refused."""
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return mpq(x)
    if type(x) is type(ZERO):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return parse_q(x, strict=False)
    if isinstance(x, GaussianRational):
        if x.im:
            raise ValueError(f"{x} is not real")
        return x.re
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def format_q(x):
    """Canonical text form: always 'p/q' with q >= 1 and gcd(p, q) = 1."""
    x = mpq(x)
    return f"{x.numerator}/{x.denominator}"


def parse_q(s, strict=True):
    """Parse a rational string. strict=True accepts only the canonical 'p/q' form."""
    if not isinstance(s, str):
        raise ValidationError(f"rational must be a string, got {s!r}")
    m = _RAT.match(s)
    if m:
        num = int(m.group(2))
        den = int(m.group(3))
        value = mpq(num, den)
        if m.group(1):
            value = -value
        if strict and (value.denominator != den or (num == 0 and (den != 1 or m.group(1)))):
            raise ValidationError(f"non-canonical rational {s!r}")
        return value
    if strict:
        raise ValidationError(f"non-canonical rational {s!r}")
    try:
        return mpq(Fraction(s.strip()))
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"cannot parse rational {s!r}") from None


class GaussianRational:
    """re + i*im with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_q(re)
        self.im = to_q(im)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, tuple):
            return cls(*x)
        if isinstance(x, complex):
            if x.real != int(x.real) or x.imag != int(x.imag):
                raise TypeError("only integral Python complex numbers are accepted")
            return cls(int(x.real), int(x.imag))
        return cls(x)

    def pair(self):
        return (self.re, self.im)

    def __add__(self, o):
        o = _g(o)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = _g(o)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        o = _g(o)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, o):
        o = _g(o)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _g(o)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = _g(o)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self):
        return GaussianRational(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def inverse(self):
        d = self.abs2()
        if d == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / d, -self.im / d)

    def is_real(self):
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        o = _g(o)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({format_q(self.re)!r}, {format_q(self.im)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def _g(x):
    if isinstance(x, GaussianRational):
        return x
    try:
        return GaussianRational.coerce(x)
    except TypeError:
        return None


def gr(x=0, y=0):
    """Shorthand constructor: gr(1, 2) is 1 + 2i; gr('1/2') is 1/2."""
    if isinstance(x, GaussianRational) and y == 0:
        return x
    return GaussianRational(x, y)


I_UNIT = GaussianRational(0, 1)


# roots ---------------------------------------------------------------------

def q_sqrt(x):
    """Exact square root of a nonnegative rational, or IrrationalScalingError."""
    x = mpq(x)
    if x < 0:
        raise IrrationalScalingError(f"square root of negative rational {format_q(x)}", format_q(x))
    p, q = x.numerator, x.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp != p or rq * rq != q:
        raise IrrationalScalingError(f"square root of {format_q(x)} is irrational", format_q(x))
    return mpq(rp, rq)


def gauss_sqrt(z):
    """A square root of z in Q(i) with nonnegative real part (positive imaginary if purely imaginary)."""
    z = gr(z)
    if not z:
        return GaussianRational(0)
    try:
        mod = q_sqrt(z.abs2())
        p2 = (z.re + mod) / 2
        q2 = (mod - z.re) / 2
        p = q_sqrt(p2)
        q = q_sqrt(q2)
    except IrrationalScalingError:
        raise IrrationalScalingError(f"square root of {z} is not a Gaussian rational",
                                     str(z)) from None
    if z.im < 0:
        q = -q
    return GaussianRational(p, q)


def sum_of_two_squares(x):
    """A Gaussian rational c with |c|^2 = x (x > 0 rational), or IrrationalScalingError."""
    x = mpq(x)
    if x <= 0:
        raise IrrationalScalingError(f"{format_q(x)} is not a positive norm", format_q(x))
    num, den = x.numerator, x.denominator
    target = num * den
    a = 0
    while a * a <= target:
        b2 = target - a * a
        b = isqrt(b2)
        if b * b == b2:
            return GaussianRational(mpq(b, den), mpq(a, den))
        a += 1
    raise IrrationalScalingError(f"{format_q(x)} is not a norm from Q(i)", format_q(x))


# small dense matrices over Q(i); lists of lists of GaussianRational ------------

def mat_identity(n):
    return [[gr(1) if i == j else gr(0) for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), gr(0)) for j in range(len(B[0]))]
            for i in range(len(A))]


def mat_vec(A, v):
    return [sum((A[i][k] * v[k] for k in range(len(v))), gr(0)) for i in range(len(A))]


def mat_scale(c, A):
    c = gr(c)
    return [[c * x for x in row] for row in A]


def mat_conj_t(A):
    return [[A[j][i].conj() for j in range(len(A))] for i in range(len(A[0]))]


def mat_conj(A):
    return [[x.conj() for x in row] for row in A]


def mat_inverse(A):
    """Gauss-Jordan inverse; raises ZeroDivisionError when singular."""
    n = len(A)
    M = [[gr(x) for x in row] + [gr(1) if i == j else gr(0) for j in range(n)]
         for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


def mat_eq(A, B):
    return all(x == y for ra, rb in zip(A, B) for x, y in zip(ra, rb))
