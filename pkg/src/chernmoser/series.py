"""Weighted truncated series with exact Gaussian-rational coefficients.

Two variable sets are used:

* real side: (z^1..z^n, zbar^1..zbar^n, u), monomial (I, J, k), weight |I|+|J|+2k;
* holomorphic side: (z^1..z^n, w), monomial (I, m), weight |I|+2m.

Internally a monomial is packed into one integer: 7 bits per exponent and the
weight stored above all exponent slots.  Adding keys multiplies monomials and
adds weights, and "weight <= K" becomes "key < (K+1) << shift", so a sorted
operand lets the product loop stop early.  Coefficients are stored as
(re, im) pairs of gmpy2.mpq; zero coefficients are never stored.
"""

from functools import lru_cache

from gmpy2 import mpq

from .errors import DimensionMismatch, TruncationError, ValidationError
from .numbers import GaussianRational, to_q

SLOT = 7
MAXEXP = (1 << SLOT) - 1
# truncation used for polynomials that are known exactly
EXACT = 100

_Z = mpq(0)


class Layout:
    __slots__ = ("n", "holo", "nv", "wts", "shift", "units", "_exps", "_conj", "_sort")

    def __init__(self, n, holo):
        self.n = n
        self.holo = holo
        self.nv = n + 1 if holo else 2 * n + 1
        self.wts = (1,) * (self.nv - 1) + (2,)
        self.shift = SLOT * self.nv
        self.units = tuple(self.key(tuple(int(i == j) for j in range(self.nv)))
                           for i in range(self.nv))
        self._exps = {}
        self._conj = {}
        self._sort = {}

    def key(self, exps):
        k = 0
        wt = 0
        for i, e in enumerate(exps):
            if e < 0 or e > MAXEXP:
                raise ValueError(f"exponent {e} out of range")
            k |= e << (SLOT * i)
            wt += e * self.wts[i]
        return k | (wt << self.shift)

    def exps(self, key):
        e = self._exps.get(key)
        if e is None:
            e = tuple((key >> (SLOT * i)) & MAXEXP for i in range(self.nv))
            self._exps[key] = e
        return e

    def weight(self, key):
        return key >> self.shift

    def limit(self, K):
        return (K + 1) << self.shift

    def conj_key(self, key):
        c = self._conj.get(key)
        if c is None:
            n = self.n
            e = self.exps(key)
            c = self.key(e[n:2 * n] + e[:n] + e[2 * n:])
            self._conj[key] = c
        return c

    def bidegree(self, key):
        e = self.exps(key)
        n = self.n
        if self.holo:
            return sum(e[:n]), 0
        return sum(e[:n]), sum(e[n:2 * n])

    def sort_key(self, key):
        s = self._sort.get(key)
        if s is None:
            e = self.exps(key)
            n = self.n
            if self.holo:
                s = (self.weight(key), sum(e[:n]), e[:n], e[n])
            else:
                s = (self.weight(key), sum(e[:n]), e[:n], e[n:2 * n], e[2 * n])
            self._sort[key] = s
        return s

    def monomial(self, key):
        e = self.exps(key)
        n = self.n
        if self.holo:
            return (e[:n], e[n])
        return (e[:n], e[n:2 * n], e[2 * n])

    def from_monomial(self, mono):
        n = self.n
        if self.holo:
            I, m = mono
            I = tuple(I)
            if len(I) != n:
                raise DimensionMismatch(f"multi-index {I} does not have length {n}")
            return self.key(I + (m,))
        I, J, k = mono
        I, J = tuple(I), tuple(J)
        if len(I) != n or len(J) != n:
            raise DimensionMismatch(f"multi-indices {I}, {J} do not have length {n}")
        return self.key(I + J + (k,))


@lru_cache(maxsize=None)
def layout(n, holo):
    if n < 1:
        raise ValueError("dimension must be positive")
    return Layout(n, holo)


# raw term-dict kernels --------------------------------------------------------

def _pair(c):
    if isinstance(c, tuple):
        return (to_q(c[0]), to_q(c[1]))
    if isinstance(c, GaussianRational):
        return (c.re, c.im)
    return (to_q(c), _Z)


def _clean(t):
    return {k: v for k, v in t.items() if v[0] or v[1]}


def _add(ta, tb, limit, sign=1):
    out = {k: v for k, v in ta.items() if k < limit}
    for k, (br, bi) in tb.items():
        if k >= limit:
            continue
        if sign < 0:
            br, bi = -br, -bi
        v = out.get(k)
        if v is None:
            out[k] = (br, bi)
        else:
            r = v[0] + br
            i = v[1] + bi
            if r or i:
                out[k] = (r, i)
            else:
                del out[k]
    return out


def _scale(t, c):
    cr, ci = c
    if not cr and not ci:
        return {}
    out = {}
    if not ci:
        for k, (r, i) in t.items():
            out[k] = (r * cr, i * cr)
        return out
    for k, (r, i) in t.items():
        nr = r * cr - i * ci
        ni = r * ci + i * cr
        if nr or ni:
            out[k] = (nr, ni)
    return out


def _mul(ta, tb, limit):
    """Truncated product of two term dicts: keep keys < limit."""
    if len(ta) > len(tb):
        ta, tb = tb, ta
    lb = sorted(tb.items())
    acc_r = {}
    acc_i = {}
    for ka, (ar, ai) in ta.items():
        lim = limit - ka
        if ai:
            for kb, (br, bi) in lb:
                if kb >= lim:
                    break
                k = ka + kb
                acc_r[k] = acc_r.get(k, _Z) + (ar * br - ai * bi)
                acc_i[k] = acc_i.get(k, _Z) + (ar * bi + ai * br)
        else:
            for kb, (br, bi) in lb:
                if kb >= lim:
                    break
                k = ka + kb
                acc_r[k] = acc_r.get(k, _Z) + ar * br
                if bi:
                    acc_i[k] = acc_i.get(k, _Z) + ar * bi
    out = {}
    for k, r in acc_r.items():
        i = acc_i.pop(k, _Z)
        if r or i:
            out[k] = (r, i)
    for k, i in acc_i.items():
        if i:
            out[k] = (_Z, i)
    return out


def _conj_terms(t, lay):
    ck = lay.conj_key
    return {ck(k): (r, -i) for k, (r, i) in t.items()}


def _compose(src, src_lay, values, limit, memo=None):
    """Evaluate the polynomial `src` (term dict in src_lay) at the term dicts `values`.

    values[i] replaces the i-th variable of src_lay; all values live in one
    target layout.  Monomial products are memoised (optionally across calls
    through `memo`, which must only be shared for identical values and limit).
    """
    nv = src_lay.nv
    if memo is None:
        memo = {}
    memo.setdefault((0,) * nv, {0: (mpq(1), _Z)})

    def power(e):
        p = memo.get(e)
        if p is not None:
            return p
        i = max(j for j in range(nv) if e[j])
        prev = e[:i] + (e[i] - 1,) + e[i + 1:]
        p = _mul(power(prev), values[i], limit)
        memo[e] = p
        return p

    acc_r = {}
    acc_i = {}
    for key in sorted(src):
        cr, ci = src[key]
        p = power(src_lay.exps(key))
        for k, (r, i) in p.items():
            if ci:
                acc_r[k] = acc_r.get(k, _Z) + (cr * r - ci * i)
                acc_i[k] = acc_i.get(k, _Z) + (cr * i + ci * r)
            else:
                acc_r[k] = acc_r.get(k, _Z) + cr * r
                if i:
                    acc_i[k] = acc_i.get(k, _Z) + cr * i
    out = {}
    for k, r in acc_r.items():
        i = acc_i.pop(k, _Z)
        if r or i:
            out[k] = (r, i)
    for k, i in acc_i.items():
        if i:
            out[k] = (_Z, i)
    return out


# series classes ------------------------------------------------------------------

class _Series:
    __slots__ = ("n", "K", "_t")
    _holo = False

    def __init__(self, n, terms=None, K=EXACT):
        """terms: mapping monomial -> coefficient.  Real side monomials are
        (I, J, k), holomorphic ones (I, m).  Terms above K are rejected."""
        if not isinstance(n, int) or n < 1:
            raise ValidationError(f"bad dimension {n!r}")
        if not isinstance(K, int) or K < 0 or K > EXACT:
            raise ValidationError(f"truncation weight must be an integer in [0, {EXACT}]")
        self.n = n
        self.K = K
        lay = layout(n, self._holo)
        t = {}
        for mono, c in dict(terms or {}).items():
            key = lay.from_monomial(mono)
            if lay.weight(key) > K:
                raise TruncationError(f"term {mono} has weight {lay.weight(key)} > truncation {K}")
            p = _pair(c)
            if key in t:
                p = (p[0] + t[key][0], p[1] + t[key][1])
            t[key] = p
        self._t = _clean(t)
        self._check()

    def _check(self):
        pass

    @classmethod
    def _raw(cls, n, t, K):
        obj = object.__new__(cls)
        obj.n = n
        obj.K = K
        obj._t = t
        return obj

    @property
    def lay(self):
        return layout(self.n, self._holo)

    # inspection
    def items(self):
        """(monomial, GaussianRational) pairs in canonical order."""
        lay = self.lay
        for key in sorted(self._t, key=lay.sort_key):
            r, i = self._t[key]
            yield lay.monomial(key), GaussianRational(r, i)

    def keys_sorted(self):
        return sorted(self._t, key=self.lay.sort_key)

    def coeff(self, *mono):
        if len(mono) == 1:
            mono = mono[0]
        key = self.lay.from_monomial(mono)
        if self.lay.weight(key) > self.K:
            raise TruncationError(f"coefficient of weight {self.lay.weight(key)} beyond truncation {self.K}")
        r, i = self._t.get(key, (_Z, _Z))
        return GaussianRational(r, i)

    def __len__(self):
        return len(self._t)

    def is_zero(self):
        return not self._t

    def weights(self):
        lay = self.lay
        return sorted({lay.weight(k) for k in self._t})

    def min_weight(self):
        """Least weight of a stored term, or None for the zero series."""
        if not self._t:
            return None
        return self.lay.weight(min(self._t))

    def __eq__(self, other):
        if not isinstance(other, _Series) or other._holo != self._holo:
            return NotImplemented
        return self.n == other.n and self.K == other.K and self._t == other._t

    def __hash__(self):
        return hash((self._holo, self.n, self.K, frozenset(self._t.items())))

    def __repr__(self):
        body = " + ".join(f"({c})*{m}" for m, c in self.items()) or "0"
        return f"{type(self).__name__}(n={self.n}, K={self.K}: {body})"

    # arithmetic
    def _same(self, other):
        if other.n != self.n:
            raise DimensionMismatch(f"dimension {self.n} vs {other.n}")
        if other._holo != self._holo:
            raise DimensionMismatch("mixing holomorphic and real-side series")

    def _result_cls(self, other):
        return type(self) if type(self) is type(other) else self._base

    def __add__(self, other):
        if not isinstance(other, _Series):
            other = self.constant(other)
        self._same(other)
        K = min(self.K, other.K)
        lay = self.lay
        return self._result_cls(other)._raw(self.n, _add(self._t, other._t, lay.limit(K)), K)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, _Series):
            other = self.constant(other)
        self._same(other)
        K = min(self.K, other.K)
        return self._result_cls(other)._raw(self.n, _add(self._t, other._t, self.lay.limit(K), -1), K)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return type(self)._raw(self.n, {k: (-r, -i) for k, (r, i) in self._t.items()}, self.K)

    def __mul__(self, other):
        if isinstance(other, _Series):
            self._same(other)
            K = min(self.K, other.K)
            t = _mul(self._t, other._t, self.lay.limit(K))
            return self._result_cls(other)._raw(self.n, t, K)
        c = _pair(other)
        cls = type(self) if not c[1] else self._base
        return cls._raw(self.n, _scale(self._t, c), self.K)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = GaussianRational.coerce(other) if not isinstance(other, GaussianRational) else other
        return self * c.inverse()

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = self.one()
        for _ in range(k):
            out = out * self
        return out

    def constant(self, c):
        p = _pair(c)
        t = {0: p} if (p[0] or p[1]) else {}
        cls = type(self) if not p[1] else self._base
        return cls._raw(self.n, t, EXACT)

    def one(self):
        return type(self)._raw(self.n, {0: (mpq(1), _Z)}, EXACT)

    def zero(self, K=None):
        return type(self)._raw(self.n, {}, self.K if K is None else K)

    # grading
    def truncate(self, K):
        """Forget everything above weight K (K may not exceed the current truncation)."""
        if K > self.K:
            raise TruncationError(f"cannot raise truncation from {self.K} to {K}")
        lim = self.lay.limit(K)
        return type(self)._raw(self.n, {k: v for k, v in self._t.items() if k < lim}, K)

    def with_truncation(self, K):
        """Same terms, declared truncation K; terms above K are dropped.  Used for
        polynomials that are exact (raising K asserts the higher terms vanish)."""
        lim = self.lay.limit(K)
        return type(self)._raw(self.n, {k: v for k, v in self._t.items() if k < lim}, K)

    def weight_component(self, m):
        if m > self.K:
            raise TruncationError(f"weight {m} is beyond truncation {self.K}")
        lay = self.lay
        t = {k: v for k, v in self._t.items() if lay.weight(k) == m}
        return type(self)._raw(self.n, t, m)

    def weight_range(self, lo, hi):
        """Terms with lo <= weight <= hi, truncation min(hi, K)."""
        hi = min(hi, self.K)
        lay = self.lay
        t = {k: v for k, v in self._t.items() if lo <= lay.weight(k) <= hi}
        return type(self)._raw(self.n, t, hi)

    def equal_mod_weight(self, other, m):
        """True iff all weight components below m agree."""
        self._same(other)
        if m > min(self.K, other.K) + 1:
            raise TruncationError(f"comparison below weight {m} needs truncation >= {m - 1}")
        lim = self.lay.limit(m - 1)
        a = {k: v for k, v in self._t.items() if k < lim}
        b = {k: v for k, v in other._t.items() if k < lim}
        return a == b

    def map_coefficients(self, fn):
        """Apply fn to each coefficient (as GaussianRational); result is of the base class."""
        t = {}
        for k, (r, i) in self._t.items():
            c = fn(GaussianRational(r, i))
            if c:
                t[k] = (c.re, c.im)
        return self._base._raw(self.n, t, self.K)

    def diff(self, var):
        """Partial derivative in the variable with layout index `var`."""
        lay = self.lay
        unit = lay.units[var]
        shift = SLOT * var
        t = {}
        for k, (r, i) in self._t.items():
            e = (k >> shift) & MAXEXP
            if e:
                t[k - unit] = (r * e, i * e)
        return type(self)._raw(self.n, t, max(self.K - lay.wts[var], 0))


class SeriesC(_Series):
    """Complex-valued truncated series in (z, zbar, u)."""

    __slots__ = ()
    _holo = False

    def conj(self):
        return self._base._raw(self.n, _conj_terms(self._t, self.lay), self.K)

    def real_part(self):
        t = _add(self._t, _conj_terms(self._t, self.lay), self.lay.limit(self.K))
        return RealSeries._raw(self.n, _scale(t, (mpq(1, 2), _Z)), self.K)

    def imag_part(self):
        t = _add(self._t, _conj_terms(self._t, self.lay), self.lay.limit(self.K), -1)
        return RealSeries._raw(self.n, _scale(t, (_Z, mpq(-1, 2))), self.K)

    def is_real(self):
        ck = self.lay.conj_key
        for k, (r, i) in self._t.items():
            c = self._t.get(ck(k))
            if c is None or c[0] != r or c[1] != -i:
                return False
        return True

    def as_real(self):
        """View as RealSeries after checking the reality condition."""
        return RealSeries(self)

    def bidegree_component(self, s, t):
        lay = self.lay
        out = {k: v for k, v in self._t.items() if lay.bidegree(k) == (s, t)}
        return type(self)._raw(self.n, out, self.K)

    def bidegrees(self):
        lay = self.lay
        return sorted({lay.bidegree(k) for k in self._t})

    def u_power_component(self, k):
        """Terms whose u-exponent is exactly k (kept with their u-power)."""
        lay = self.lay
        out = {key: v for key, v in self._t.items() if lay.exps(key)[-1] == k}
        return type(self)._raw(self.n, out, self.K)

    def at_u_zero(self):
        return self.u_power_component(0)

    def d_z(self, alpha):
        return self.diff(alpha)

    def d_zbar(self, alpha):
        return self.diff(self.n + alpha)

    def d_u(self):
        return self.diff(2 * self.n)

    def compose(self, zs, zbars, u, K, memo=None):
        """Evaluate at z := zs, zbar := zbars, u := u (all SeriesC), truncated at K."""
        vals = [s._t for s in zs] + [s._t for s in zbars] + [u._t]
        t = _compose(self._t, self.lay, vals, self.lay.limit(K), memo)
        return SeriesC._raw(self.n, t, K)


class RealSeries(SeriesC):
    """SeriesC whose coefficient at (I, J, k) is the conjugate of the one at (J, I, k)."""

    __slots__ = ()

    def __init__(self, n, terms=None, K=EXACT):
        if isinstance(n, SeriesC):
            src = n
            self.n, self.K, self._t = src.n, src.K, dict(src._t)
            self._check()
            return
        super().__init__(n, terms, K)

    def _check(self):
        ck = self.lay.conj_key
        for k, (r, i) in self._t.items():
            c = self._t.get(ck(k))
            if c is None or c[0] != r or c[1] != -i:
                mono = self.lay.monomial(k)
                raise ValidationError(f"reality violated at monomial {mono}")

    def conj(self):
        return self


class HoloSeries(_Series):
    """Truncated holomorphic series in (z, w)."""

    __slots__ = ()
    _holo = True

    def d_z(self, alpha):
        return self.diff(alpha)

    def d_w(self):
        return self.diff(self.n)

    def w_slices(self):
        """{m: term dict of the z-polynomial multiplying w^m}."""
        lay = self.lay
        unit = lay.units[self.n]
        out = {}
        for k, v in self._t.items():
            m = lay.exps(k)[-1]
            out.setdefault(m, {})[k - m * unit] = v
        return out

    def conj_coefficients(self):
        return HoloSeries._raw(self.n, {k: (r, -i) for k, (r, i) in self._t.items()}, self.K)

    def compose(self, zs, w, K, memo=None):
        """Evaluate at z := zs, w := w (series of one common type), truncated at K."""
        vals = [s._t for s in zs] + [w._t]
        tgt = w._base
        t = _compose(self._t, self.lay, vals, w.lay.limit(K), memo)
        return tgt._raw(w.n, t, K)


SeriesC._base = SeriesC
RealSeries._base = SeriesC
HoloSeries._base = HoloSeries


# constructors ---------------------------------------------------------------------

def z_var(n, alpha, K=EXACT):
    lay = layout(n, False)
    return SeriesC._raw(n, {lay.units[alpha]: (mpq(1), _Z)}, K)


def zbar_var(n, alpha, K=EXACT):
    lay = layout(n, False)
    return SeriesC._raw(n, {lay.units[n + alpha]: (mpq(1), _Z)}, K)


def u_var(n, K=EXACT):
    lay = layout(n, False)
    return RealSeries._raw(n, {lay.units[2 * n]: (mpq(1), _Z)}, K)


def hz_var(n, alpha, K=EXACT):
    lay = layout(n, True)
    return HoloSeries._raw(n, {lay.units[alpha]: (mpq(1), _Z)}, K)


def w_var(n, K=EXACT):
    lay = layout(n, True)
    return HoloSeries._raw(n, {lay.units[n]: (mpq(1), _Z)}, K)


def holo_to_real(h, K=None):
    """Embed a holomorphic series without w-dependence into the real side."""
    hl = h.lay
    rl = layout(h.n, False)
    n = h.n
    t = {}
    for k, v in h._t.items():
        e = hl.exps(k)
        if e[n]:
            raise ValueError("series depends on w")
        t[rl.key(e[:n] + (0,) * n + (0,))] = v
    return SeriesC._raw(n, t, h.K if K is None else K)


def monomial_count(n, m, holo=False):
    """Number of monomials of exact weight m."""
    from math import comb
    nz = n if holo else 2 * n
    return sum(comb(m - 2 * k + nz - 1, nz - 1) for k in range(m // 2 + 1))


def monomials_of_weight(n, m, holo=False):
    """All monomial keys of weight m in canonical order."""
    lay = layout(n, holo)
    nz = n if holo else 2 * n
    out = []
    for k in range(m // 2 + 1):
        for e in _compositions(m - 2 * k, nz):
            out.append(lay.key(e + (k,)))
    out.sort(key=lay.sort_key)
    return out


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
