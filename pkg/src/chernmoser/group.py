"""The isotropy group of the hyperquadric at the origin.

An element sigma = (C, a, rho, r) acts by the fractional linear map

    z* = C (z - a w) / (1 + delta),   w* = rho w / (1 + delta),
    1 + delta = 1 + 2i<z,a> - w (r + i<a,a>),

with <Cz,Cz> = rho <z,z>.  It factors as (C,0,rho,r) o (I,a,1,0).
"""

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import InvalidSigmaError, TruncationError
from .hermitian import Signature
from .maps import HoloMap, compose_maps
from .numbers import (GaussianRational, gr, mat_conj_t, mat_eq, mat_identity, mat_inverse,
                      mat_mul, mat_vec, to_q)
from .series import hz_var, w_var


@dataclass(frozen=True)
class InitialValue:
    sig: Signature
    C: tuple
    a: tuple
    rho: object
    r: object

    @property
    def n(self):
        return self.sig.n

    def matrix(self):
        return [list(row) for row in self.C]

    def is_identity(self):
        return self == identity_sigma(self.sig)

    def __repr__(self):
        C = [[str(x) for x in row] for row in self.C]
        return f"InitialValue(C={C}, a={[str(x) for x in self.a]}, rho={self.rho}, r={self.r})"


def validate_sigma(C, a, rho, r, sig):
    """Build an InitialValue, checking C* g C = rho g and rho != 0."""
    n = sig.n
    try:
        C = tuple(tuple(gr(x) if not isinstance(x, GaussianRational) else x for x in row) for row in C)
        a = tuple(GaussianRational.coerce(x) for x in a)
        rho = to_q(rho)
        r = to_q(r)
    except (TypeError, ValueError) as exc:
        raise InvalidSigmaError(f"bad initial value entries: {exc}") from None
    if len(C) != n or any(len(row) != n for row in C) or len(a) != n:
        raise InvalidSigmaError(f"initial value shapes do not match n={n}")
    if rho == 0:
        raise InvalidSigmaError("rho must be nonzero")
    g = [[gr(sig.eps(i)) if i == j else gr(0) for j in range(n)] for i in range(n)]
    Cm = [list(row) for row in C]
    lhs = mat_mul(mat_mul(mat_conj_t(Cm), g), Cm)
    rhs = [[x * rho for x in row] for row in g]
    if not mat_eq(lhs, rhs):
        raise InvalidSigmaError("<Cz,Cz> = rho <z,z> fails")
    try:
        mat_inverse(Cm)
    except ZeroDivisionError:
        raise InvalidSigmaError("C is singular") from None
    return InitialValue(sig, C, a, rho, r)


def identity_sigma(sig):
    n = sig.n
    return InitialValue(sig, tuple(tuple(row) for row in mat_identity(n)),
                        tuple(gr(0) for _ in range(n)), mpq(1), mpq(0))


def _dot(sig, x, y):
    """<x, y> = sum eps x^a conj(y^a) for constant vectors."""
    return sum((x[a] * y[a].conj() * sig.eps(a) for a in range(sig.n)), gr(0))


def phi_sigma_series(sigma, K):
    """Expansion of the fractional linear map of sigma, f through K-1 and g through K."""
    sig, n = sigma.sig, sigma.n
    zs = [hz_var(n, b, K) for b in range(n)]
    w = w_var(n, K)
    za = None
    for b in range(n):
        ab = sigma.a[b].conj() * sig.eps(b)
        if ab:
            t = zs[b] * ab
            za = t if za is None else za + t
    delta = w * (-(gr(sigma.r) + gr(0, 1) * _dot(sig, sigma.a, sigma.a)))
    if za is not None:
        delta = delta + za * gr(0, 2)
    # 1/(1+delta) = sum (-delta)^k; delta has no constant term
    inv = w.one().with_truncation(K)
    p = inv
    for _ in range(K):
        p = p * (-delta)
        if p.is_zero():
            break
        inv = inv + p
    f = []
    for al in range(n):
        num = None
        for b in range(n):
            c = sigma.C[al][b]
            if c:
                t = (zs[b] - w * sigma.a[b]) * c
                num = t if num is None else num + t
        f.append((num * inv).truncate(K - 1))
    g = (w * inv * sigma.rho).truncate(K)
    return HoloMap(f, g, K)


def extract_initial_value(phi, sig=None, check=True):
    """sigma from the jets: C = df/dz, -Ca = df/dw, rho = Re dg/dw, 2 rho r = Re d2g/dw2."""
    n = phi.n
    if sig is None:
        sig = Signature(n, n)
    if phi.K < 4:
        raise TruncationError("reading r needs the map through weight 4")
    C = phi.linear_z()
    Ci = mat_inverse(C)
    a = [-x for x in mat_vec(Ci, phi.df_dw())]
    rho = phi.dg_dw().re
    r = phi.g.coeff((0,) * n, 2).re / rho
    if check:
        return validate_sigma(C, a, rho, r, sig)
    return InitialValue(sig, tuple(tuple(row) for row in C), tuple(a), rho, r)


def sigma_inverse(sigma):
    Ci = mat_inverse(sigma.matrix())
    rho_i = 1 / sigma.rho
    a = [-(x * rho_i) for x in mat_vec(sigma.matrix(), list(sigma.a))]
    return validate_sigma(Ci, a, rho_i, -sigma.r * rho_i, sigma.sig)


def sigma_compose(s1, s2):
    """The group product s1 s2, read off the composed maps."""
    if s1.sig != s2.sig:
        raise InvalidSigmaError("initial values for different signatures")
    phi = compose_maps(phi_sigma_series(s1, 4), phi_sigma_series(s2, 4))
    return extract_initial_value(phi, s1.sig)


def sigma_decompose(sigma):
    """(psi-part (I,a,1,0), phi-part (C,0,rho,r)) with sigma = phi-part * psi-part."""
    sig, n = sigma.sig, sigma.n
    psi = validate_sigma(mat_identity(n), sigma.a, 1, 0, sig)
    lin = validate_sigma(sigma.matrix(), [gr(0)] * n, sigma.rho, sigma.r, sig)
    return psi, lin


def stabilizes(M, sigma, K=None):
    """True iff the normalization with initial value sigma maps M onto itself through weight K."""
    from .normalize import normalize
    K = M.K if K is None else K
    res = normalize(M, sigma, K)
    return res.surface.F.equal_mod_weight(M.F.truncate(K), K + 1)
