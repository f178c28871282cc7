"""Holomorphic maps fixing the origin, and how they push hypersurfaces forward.

A hypersurface is written v = F(z, zbar, u) with w = u + iv.  A map
(z, w) -> (f, g) sends it to v* = F*(z*, zbar*, u*) exactly when

    Im g(z, u + iF) = F*(f, conj f, Re g)     (all evaluated at w = u + iF),

where F* includes its Hermitian part.  Everything below is organised around
this identity.
"""

from gmpy2 import mpq

from .errors import DimensionMismatch, TruncationError, ValidationError
from .hermitian import check_levi, hermitian_form
from .numbers import GaussianRational, mat_conj, mat_inverse
from .series import (HoloSeries, RealSeries, SeriesC, hz_var, layout, u_var, w_var,
                     z_var, zbar_var)


class Hypersurface:
    """v = F(z, zbar, u) through weight K, with weight-2 part <z,z>."""

    __slots__ = ("sig", "F")

    def __init__(self, sig, F):
        if not isinstance(F, RealSeries):
            if isinstance(F, SeriesC):
                F = RealSeries(F)
            else:
                raise ValidationError("defining series must be a RealSeries")
        if F.n != sig.n:
            raise DimensionMismatch(f"series in {F.n} variables, signature for {sig.n}")
        check_levi(F, sig)
        self.sig = sig
        self.F = F

    @property
    def n(self):
        return self.sig.n

    @property
    def K(self):
        return self.F.K

    @classmethod
    def quadric(cls, sig, K):
        return cls(sig, hermitian_form(sig, K))

    @classmethod
    def from_terms(cls, sig, terms, K):
        """Hermitian form plus the given terms (their conjugates are added when missing)."""
        F = RealSeries(sig.n, _symmetrize(sig.n, terms), K)
        return cls(sig, F + hermitian_form(sig, K))

    def nonquadratic(self):
        return self.F - hermitian_form(self.sig, self.K)

    def truncate(self, K):
        return Hypersurface(self.sig, self.F.truncate(K))

    def __eq__(self, other):
        return isinstance(other, Hypersurface) and self.sig == other.sig and self.F == other.F

    def __hash__(self):
        return hash((self.sig, self.F))

    def __repr__(self):
        return f"Hypersurface(sig=({self.sig.n},{self.sig.e}), K={self.K}, F={self.F!r})"


def _symmetrize(n, terms):
    """Add the conjugate partner of each term unless it is listed explicitly."""
    terms = {(tuple(I), tuple(J), k): GaussianRational.coerce(c)
             for (I, J, k), c in dict(terms).items()}
    out = dict(terms)
    for (I, J, k), c in terms.items():
        partner = (J, I, k)
        if partner not in terms:
            out[partner] = c.conj()
    return out


class HoloMap:
    """(z, w) -> (f(z, w), g(z, w)); f known through weight K-1, g through weight K."""

    __slots__ = ("n", "K", "f", "g")

    def __init__(self, f, g, K, check=True):
        f = list(f)
        n = len(f)
        if n < 1:
            raise ValidationError("map needs at least one z-component")
        for comp in f + [g]:
            if not isinstance(comp, HoloSeries) or comp.n != n:
                raise DimensionMismatch("map components must be HoloSeries in n variables")
        if any(c.K < K - 1 for c in f) or g.K < K:
            raise TruncationError(f"components are not known through the declared truncation {K}")
        self.n = n
        self.K = K
        self.f = [c.truncate(K - 1) for c in f]
        self.g = g.truncate(K)
        if check:
            self._validate()

    def _validate(self):
        n = self.n
        lay = layout(n, True)
        for c in self.f + [self.g]:
            if 0 in c._t:
                raise ValidationError("map must fix the origin")
        for a in range(n):
            if lay.units[a] in self.g._t:
                raise ValidationError("dg/dz must vanish at the origin")
        C = self.linear_z()
        try:
            mat_inverse(C)
        except ZeroDivisionError:
            raise ValidationError("df/dz is singular at the origin") from None
        if not self.dg_dw():
            raise ValidationError("dg/dw vanishes at the origin")

    @classmethod
    def identity(cls, n, K):
        return cls([hz_var(n, a, K - 1) for a in range(n)], w_var(n, K), K)

    def linear_z(self):
        """C with C[a][b] = df^a/dz^b at 0."""
        return [[self.f[a].coeff(tuple(int(i == b) for i in range(self.n)), 0) for b in range(self.n)]
                for a in range(self.n)]

    def df_dw(self):
        if self.K < 3:
            raise TruncationError("df/dw needs truncation >= 3")
        return [self.f[a].coeff((0,) * self.n, 1) for a in range(self.n)]

    def dg_dw(self):
        return self.g.coeff((0,) * self.n, 1)

    def truncate(self, K):
        return HoloMap(self.f, self.g, K, check=False)

    def __eq__(self, other):
        return (isinstance(other, HoloMap) and self.n == other.n and self.K == other.K
                and self.f == other.f and self.g == other.g)

    def __repr__(self):
        return f"HoloMap(n={self.n}, K={self.K}, f={self.f!r}, g={self.g!r})"


# lifting to the hypersurface ---------------------------------------------------------

def w_on_surface(F, K):
    """u + iF truncated at K."""
    return (u_var(F.n, K) + F * GaussianRational(0, 1)).truncate(K)


def substitute_w(h, M, K=None):
    """h(z, u + iF(z, zbar, u)) as a SeriesC."""
    F = M.F if isinstance(M, Hypersurface) else M
    if K is None:
        K = min(h.K, F.K)
    zs = [z_var(F.n, a, K) for a in range(F.n)]
    return h.compose(zs, w_on_surface(F, K), K)


def lift_map(phi, F, K):
    """(f~, g~): map components evaluated on v = F, truncated at K (f~ at K-1... see note).

    Both are returned truncated at K; the f-components are exact only through
    K-1 because f is.
    """
    n = phi.n
    zs = [z_var(n, a, K) for a in range(n)]
    W = w_on_surface(F, K)
    memo = {}
    ft = [c.with_truncation(K).compose(zs, W, K, memo) for c in phi.f]
    gt = phi.g.compose(zs, W, K, memo)
    return ft, gt


def pullback(G, ft, gt, K, memo=None):
    """G(f~, conj f~, Re g~) truncated at K."""
    ftb = [c.conj() for c in ft]
    return G.compose(ft, ftb, gt.real_part(), K, memo)


def identity_residual(phi, F, G, K):
    """Im g~ - G(f~, conj f~, Re g~) through weight K; zero iff phi maps v=F onto v=G."""
    ft, gt = lift_map(phi, F, K)
    return (gt.imag_part() - pullback(G, ft, gt, K)).truncate(K)


# composition and inversion --------------------------------------------------------

def compose_maps(phi1, phi2):
    """phi1 o phi2."""
    if phi1.n != phi2.n:
        raise DimensionMismatch("maps of different dimension")
    K = min(phi1.K, phi2.K)
    f2 = [c.truncate(K - 1).with_truncation(K) for c in phi2.f]
    g2 = phi2.g.truncate(K)
    memo = {}
    f = [c.with_truncation(K - 1).compose(f2, g2, K - 1, memo) for c in phi1.f]
    g = phi1.g.compose(f2, g2, K)
    return HoloMap(f, g, K)


def invert_map(phi):
    """Inverse map, solved weight by weight from f(f*, g*) = z, g(f*, g*) = w."""
    n, K = phi.n, phi.K
    C = phi.linear_z()
    try:
        Ci = mat_inverse(C)
    except ZeroDivisionError:
        raise ValidationError("non-invertible linear part") from None
    rho = phi.dg_dw()
    if not rho:
        raise ValidationError("non-invertible linear part")
    rho_inv = rho.inverse()
    fs = [HoloSeries._raw(n, {}, K) for _ in range(n)]
    gs = HoloSeries._raw(n, {}, K)
    zt = [hz_var(n, a, K) for a in range(n)]
    wt = w_var(n, K)
    for m in range(1, K + 1):
        # g* at weight m: everything else in g(f*, g*) at weight m is already known
        cur = phi.g.compose(fs, gs, m)
        res = (wt.truncate(m) - cur).weight_component(m)
        gs = gs + (res * rho_inv).with_truncation(K)
        if m <= K - 1:
            cur = [c.with_truncation(m).compose(fs, gs, m) for c in phi.f]
            res = [(zt[a].truncate(m) - cur[a]).weight_component(m) for a in range(n)]
            for a in range(n):
                upd = None
                for b in range(n):
                    if Ci[a][b]:
                        term = res[b] * Ci[a][b]
                        upd = term if upd is None else upd + term
                if upd is not None:
                    fs[a] = fs[a] + upd.with_truncation(K)
    return HoloMap([c.truncate(K - 1) for c in fs], gs.truncate(K), K)


def agree_up_to(phi1, phi2, m):
    """phi1 = phi2 + O_x(m): f's agree below weight m-1, g's below weight m."""
    if phi1.n != phi2.n:
        raise DimensionMismatch("maps of different dimension")
    if m > min(phi1.K, phi2.K) + 1:
        raise TruncationError(f"O_x({m}) comparison needs truncation >= {m - 1}")
    return (all(a.equal_mod_weight(b, m - 1) for a, b in zip(phi1.f, phi2.f))
            and phi1.g.equal_mod_weight(phi2.g, m))


# pushforward --------------------------------------------------------------------------

def _leading_inverse(C, reg2, n, m):
    """Substitution values undoing z -> Cz, zbar -> conj(C) zbar, u -> reg2 (weight 2 part of Re g~)."""
    Ci = mat_inverse(C)
    Cib = mat_conj(Ci)
    zs = [z_var(n, a, m) for a in range(n)]
    zbs = [zbar_var(n, a, m) for a in range(n)]
    new_z = [_lin(Ci[a], zs) for a in range(n)]
    new_zb = [_lin(Cib[a], zbs) for a in range(n)]
    lay = layout(n, False)
    rho = reg2._t.get(lay.units[2 * n], (mpq(0), mpq(0)))[0]
    if not rho:
        raise ValidationError("Re dg/dw vanishes at the origin")
    q = reg2 - u_var(n, 2) * rho
    q_sub = q.compose(new_z, new_zb, u_var(n, m), m)
    new_u = (u_var(n, m) - q_sub) * (1 / rho)
    return new_z, new_zb, new_u


def _lin(row, vars_):
    out = None
    for c, v in zip(row, vars_):
        if c:
            t = v * c
            out = t if out is None else out + t
    return out if out is not None else vars_[0] * 0


def transform_hypersurface(phi, M):
    """The image phi(M), solved weight by weight from the identity above."""
    if phi.n != M.n:
        raise DimensionMismatch("map and hypersurface dimensions differ")
    n = M.n
    K = min(phi.K, M.K)
    ft, gt = lift_map(phi, M.F, K)
    ftb = [c.conj() for c in ft]
    reg = gt.real_part()
    res = gt.imag_part()
    lay = layout(n, False)
    low = [k for k in res._t if lay.weight(k) < 2]
    if low:
        raise ValidationError("image does not pass through the origin tangentially")
    C = phi.linear_z()
    G = RealSeries._raw(n, {}, K)
    if K < 2:
        raise TruncationError("need truncation >= 2")
    sub = _leading_inverse(C, reg.weight_component(2), n, K)
    memo = {}
    for m in range(2, K + 1):
        r_m = res.weight_component(m)
        if r_m.is_zero():
            continue
        G_m = r_m.compose(*sub, m)
        G_m = RealSeries._raw(n, G_m._t, K)
        G = G + G_m
        res = res - G_m.compose(ft, ftb, reg, K, memo)
    return Hypersurface(M.sig, RealSeries(G))
