"""Order-by-order normalization.

At each weight m the unknowns are the weight-(m-1) part of f, the weight-m
part of g and the weight-m part of the new defining series F*.  They enter
the pushforward identity through the linear operator

    L(f, g, F*) = Re{2<f(z,w), Cz> + i g(z,w)} - F*(Cz, conj(C) zbar, rho u),   w = u + i<z,z>,

and everything else at weight m is a residual computed from the partial map.
Substituting f = C f', g = rho g' and F*(Cz, .., rho u) = rho H reduces every
weight to the same operator with C = I, rho = 1, so one solve plan per
(n, e, m) serves all initial values.
"""

from dataclasses import dataclass, field
from functools import lru_cache

from gmpy2 import mpq

from .errors import TruncationError, ValidationError
from .group import InitialValue, identity_sigma, validate_sigma
from .hermitian import Signature, hermitian_form, laplacian
from .linalg import SolvePlan, rank
from .maps import HoloMap, Hypersurface, identity_residual, pullback, w_on_surface
from .numbers import GaussianRational, gr, mat_conj, mat_inverse
from .series import (EXACT, HoloSeries, RealSeries, SeriesC, hz_var, layout, monomials_of_weight,
                     u_var, w_var, z_var, zbar_var)

_I = GaussianRational(0, 1)
_ONE = GaussianRational(1, 0)


@dataclass
class NormalizationResult:
    map: HoloMap
    surface: Hypersurface
    sigma: InitialValue
    log: list = field(default_factory=list)


# the operator ---------------------------------------------------------------------------

def _check_homogeneous(s, m, what):
    bad = [w for w in s.weights() if w != m]
    if bad:
        raise ValidationError(f"{what} must be weighted homogeneous of weight {m}")


def apply_L(k, f, g, Fstar, sig, C=None, rho=1):
    """Value of L_k on (f_{k-1}, g_k, F*_k) for linear data (C, rho)."""
    n = sig.n
    if len(f) != n:
        raise ValidationError(f"expected {n} f-components")
    for comp in f:
        _check_homogeneous(comp, k - 1, "f")
    _check_homogeneous(g, k, "g")
    _check_homogeneous(Fstar, k, "F*")
    if C is None:
        C = [[gr(int(i == j)) for j in range(n)] for i in range(n)]
    rho = mpq(rho)
    zs = [z_var(n, a, k) for a in range(n)]
    zbs = [zbar_var(n, a, k) for a in range(n)]
    W = w_on_surface(hermitian_form(sig, k), k)
    memo = {}
    ft = [c.with_truncation(k).compose(zs, W, k, memo) for c in f]
    gt = g.with_truncation(k).compose(zs, W, k, memo)
    Cz_bar = [_comb(mat_conj(C)[a], zbs) for a in range(n)]
    pair = None
    for a in range(n):
        t = ft[a] * Cz_bar[a] * sig.eps(a)
        pair = t if pair is None else pair + t
    val = (pair * 2 + gt * _I).real_part()
    Cz = [_comb(C[a], zs) for a in range(n)]
    Fs = Fstar.with_truncation(k).compose(Cz, Cz_bar, u_var(n, k) * rho, k)
    return RealSeries(val - Fs)


def _comb(row, vars_):
    out = vars_[0] * 0
    for c, v in zip(row, vars_):
        if c:
            out = out + v * c
    return out


def _is_canonical(lay, n, key):
    e = lay.exps(key)
    I, J = e[:n], e[n:2 * n]
    return (sum(I), I) >= (sum(J), J)


class _WeightSystem:
    """Columns, rows and images of the reduced operator at one weight."""

    def __init__(self, n, e, m):
        self.n, self.e, self.m = n, e, m
        sig = self.sig = Signature(n, e)
        rl = self.rlay = layout(n, False)
        self.hlay = layout(n, True)
        cols = []
        # H first: those columns only touch their own rows and the trace rows
        for key in _real_keys(n, m):
            s, t = rl.bidegree(key)
            if min(s, t) < 2 or not _is_canonical(rl, n, key):
                continue
            cols.append(("h", key, 0))
            if key != rl.conj_key(key):
                cols.append(("h", key, 1))
        for key in _holo_keys(n, m):
            cols += [("g", key, 0), ("g", key, 1)]
        for a in range(n):
            for key in _holo_keys(n, m - 1):
                cols += [("f", a, key, 0), ("f", a, key, 1)]
        self.cols = cols
        self.col_index = {c: i for i, c in enumerate(cols)}

        rows = []
        for key in _real_keys(n, m):
            if _is_canonical(rl, n, key):
                rows.append(("eq", key, 0))
                if key != rl.conj_key(key):
                    rows.append(("eq", key, 1))
        self.n_eq = len(rows)
        self.row_index = {r: i for i, r in enumerate(rows)}
        self.rows_labels = rows

        W = u_var(n, EXACT) + hermitian_form(sig) * _I
        self._Wp = [W ** j for j in range(m // 2 + 1)]
        L = [dict() for _ in range(len(rows))]
        T = {}  # trace-row label -> {col: value}
        for ci, col in enumerate(cols):
            img = self._image(col)
            for key, (re, im) in img._t.items():
                if not _is_canonical(rl, n, key):
                    continue
                if re:
                    L[self.row_index[("eq", key, 0)]][ci] = re
                if im and key != rl.conj_key(key):
                    L[self.row_index[("eq", key, 1)]][ci] = im
            if col[0] == "h":
                for lab, v in self._trace_entries(col):
                    T.setdefault(lab, {})[ci] = v
        self.L = L
        self.trace_labels = sorted(T, key=_label_order)
        self.T = [T[lab] for lab in self.trace_labels]

    def _holo_monomial(self, key):
        """z^I w^j on the quadric as a SeriesC."""
        n = self.n
        e = self.hlay.exps(key)
        zpart = [0] * (2 * n + 1)
        zpart[:n] = e[:n]
        mono = SeriesC._raw(n, {self.rlay.key(tuple(zpart)): (mpq(1), mpq(0))}, EXACT)
        return mono * self._Wp[e[n]]

    def _image(self, col):
        n = self.n
        if col[0] == "h":
            _, key, p = col
            c = _ONE if p == 0 else _I
            mono = SeriesC._raw(n, {key: (mpq(1), mpq(0))}, EXACT) * c
            if key == self.rlay.conj_key(key):
                return -mono
            return -(mono + mono.conj())
        if col[0] == "g":
            _, key, p = col
            c = _I if p == 0 else -_ONE  # i * (1 or i)
            return (self._holo_monomial(key) * c).real_part()
        _, a, key, p = col
        c = _ONE if p == 0 else _I
        zb = zbar_var(n, a, EXACT)
        return (self._holo_monomial(key) * zb * (c * (2 * self.sig.eps(a)))).real_part()

    def _trace_entries(self, col):
        _, key, p = col
        n, rl = self.n, self.rlay
        s, t = rl.bidegree(key)
        if (s, t) not in ((2, 2), (3, 2), (3, 3)):
            return []
        c = _ONE if p == 0 else _I
        mono = SeriesC._raw(n, {key: (mpq(1), mpq(0))}, EXACT) * c
        h = mono if key == rl.conj_key(key) else mono + mono.conj()
        times = {(2, 2): 1, (3, 2): 2, (3, 3): 3}[(s, t)]
        d = laplacian(h.bidegree_component(s, t), self.sig, times)
        out = []
        for k2, (re, im) in d._t.items():
            tag = ("tr", s, t, k2)
            if re:
                out.append((tag + (0,), re))
            if im and (s, t) == (3, 2):
                out.append((tag + (1,), im))
            # (2,2) and (3,3) traces are real: their imaginary parts repeat conjugate rows
            elif im and k2 != rl.conj_key(k2):
                out.append((tag + (1,), im))
        return out

    def stacked(self):
        return self.L + self.T

    def pin_rows(self):
        """Rows fixing the kernel: f' w-coefficient at m=3, Re g' w^2-coefficient at m=4."""
        n, hl = self.n, self.hlay
        rows = []
        if self.m == 3:
            wkey = hl.key((0,) * n + (1,))
            for a in range(n):
                for p in (0, 1):
                    rows.append((("pin-a", a, p), {self.col_index[("f", a, wkey, p)]: mpq(1)}))
        elif self.m == 4:
            w2 = hl.key((0,) * n + (2,))
            rows.append((("pin-r",), {self.col_index[("g", w2, 0)]: mpq(1)}))
        return rows


def _label_order(lab):
    return (lab[1], lab[2], lab[3], lab[4])


@lru_cache(maxsize=None)
def _real_keys(n, m):
    return tuple(monomials_of_weight(n, m, False))


@lru_cache(maxsize=None)
def _holo_keys(n, m):
    return tuple(monomials_of_weight(n, m, True))


@lru_cache(maxsize=None)
def weight_system(n, e, m):
    return _WeightSystem(n, e, m)


@lru_cache(maxsize=None)
def _plan(n, e, m):
    ws = weight_system(n, e, m)
    pins = ws.pin_rows()
    rows = ws.stacked() + [r for _, r in pins]
    return SolvePlan(rows, len(ws.cols))


# kernel analysis ------------------------------------------------------------------------

def analyze_L(k, n, e=None):
    """Dimensions of the reduced operator at weight k on the normal-form subspace."""
    if k < 3:
        raise ValidationError("operator analysis needs k >= 3")
    e = n if e is None else e
    ws = weight_system(n, e, k)
    r_all = rank(ws.stacked())
    r_T = rank(ws.T)
    domain = len(ws.cols) - r_T
    codomain = ws.n_eq
    r_L = r_all - r_T
    return {"k": k, "n": n, "e": e, "domain_dim": domain, "codomain_dim": codomain,
            "rank": r_L, "kernel_dim": domain - r_L, "surjective": r_L == codomain}


def kernel_dimension(k, n, e=None):
    """Real dimension of ker L_k with F* constrained to the normal-form subspace."""
    return analyze_L(k, n, e)["kernel_dim"]


# normalization ---------------------------------------------------------------------------

def _substitute_linear(H, Ci, rho, K):
    """rho * H(C^{-1} z, conj(C^{-1}) zbar, u / rho)."""
    n = H.n
    zs = [z_var(n, a, K) for a in range(n)]
    zbs = [zbar_var(n, a, K) for a in range(n)]
    new_z = [_comb(Ci[a], zs) for a in range(n)]
    new_zb = [_comb(mat_conj(Ci)[a], zbs) for a in range(n)]
    return H.compose(new_z, new_zb, u_var(n, K) * (1 / rho), K) * rho


def _decode(ws, x):
    n, rl = ws.n, ws.rlay
    f = [dict() for _ in range(n)]
    g = {}
    h = {}

    def put(t, key, p, v):
        re, im = t.get(key, (mpq(0), mpq(0)))
        t[key] = (re + v, im) if p == 0 else (re, im + v)

    for col, v in zip(ws.cols, x):
        if not v:
            continue
        if col[0] == "f":
            put(f[col[1]], col[2], col[3], v)
        elif col[0] == "g":
            put(g, col[1], col[2], v)
        else:
            _, key, p = col
            put(h, key, p, v)
            ck = rl.conj_key(key)
            if ck != key:
                re, im = h[key]
                h[ck] = (re, -im)
    clean = lambda t: {k: c for k, c in t.items() if c[0] or c[1]}
    fs = [HoloSeries._raw(n, clean(t), EXACT) for t in f]
    gs = HoloSeries._raw(n, clean(g), EXACT)
    hs = RealSeries._raw(n, clean(h), EXACT)
    return fs, gs, hs


def _rhs(ws, res, rho, sigma):
    b = [mpq(0)] * (len(ws.L) + len(ws.T))
    inv = 1 / rho
    for key, (re, im) in res._t.items():
        if not _is_canonical(ws.rlay, ws.n, key):
            continue
        if re:
            b[ws.row_index[("eq", key, 0)]] = re * inv
        if im and key != ws.rlay.conj_key(key):
            b[ws.row_index[("eq", key, 1)]] = im * inv
    for lab, _ in ws.pin_rows():
        if lab[0] == "pin-a":
            _, a, p = lab
            v = -sigma.a[a]
            b.append(v.re if p == 0 else v.im)
        else:
            b.append(mpq(sigma.r))
    return b


def normalize(M, sigma=None, K=None):
    """Normalizing map with initial value sigma and the normal form it produces, through weight K."""
    sig, n = M.sig, M.n
    if sigma is None:
        sigma = identity_sigma(sig)
    if sigma.sig != sig:
        raise ValidationError("initial value is for a different signature")
    sigma = validate_sigma(sigma.C, sigma.a, sigma.rho, sigma.r, sig)
    K = M.K if K is None else K
    if K > M.K:
        raise TruncationError(f"surface known through weight {M.K}, asked for {K}")
    if K < 2:
        raise TruncationError("normalization needs truncation >= 2")
    C = sigma.matrix()
    Ci = mat_inverse(C)
    rho = sigma.rho
    zs_h = [hz_var(n, a, EXACT) for a in range(n)]
    f = [_comb(C[a], zs_h) for a in range(n)]
    g = w_var(n, EXACT) * rho
    G = hermitian_form(sig)
    F = M.F.truncate(K)
    log = []
    for m in range(3, K + 1):
        ws = weight_system(n, sig.e, m)
        plan = _plan(n, sig.e, m)
        res = _residual(F.truncate(m), G, f, g, m).weight_component(m)
        x = plan.solve(_rhs(ws, res, rho, sigma))
        fp, gp, hp = _decode(ws, x)
        for a in range(n):
            upd = _comb_series(C[a], fp)
            if upd is not None:
                f[a] = f[a] + upd
        g = g + gp * rho
        G = G + RealSeries._raw(n, (-_substitute_linear(hp, Ci, rho, m))._t, EXACT)
        log.append({"weight": m, "unknowns": len(ws.cols), "equations": len(ws.L) + len(ws.T),
                    "pins": len(ws.pin_rows())})
    phi = HoloMap([c.truncate(K - 1).with_truncation(K - 1) for c in f], g.truncate(K), K)
    surface = Hypersurface(sig, RealSeries(G.truncate(K)))
    return NormalizationResult(phi, surface, sigma, log)


def _comb_series(row, series):
    out = None
    for c, s in zip(row, series):
        if c and not s.is_zero():
            t = s * c
            out = t if out is None else out + t
    return out


def _residual(F, G, f, g, m):
    n = F.n
    zs = [z_var(n, a, m) for a in range(n)]
    W = w_on_surface(F, m)
    memo = {}
    ft = [c.truncate(m).compose(zs, W, m, memo) for c in f]
    gt = g.truncate(m).compose(zs, W, m, memo)
    return (gt.imag_part() - pullback(G.truncate(m), ft, gt, m)).truncate(m)


def verify_identity_residual(M, result):
    """Exact difference of the two sides of the pushforward identity; zero on success."""
    K = result.map.K
    return identity_residual(result.map, M.F.truncate(K), result.surface.F, K)
