"""Umbilic points, reduced normal forms and weight lowering."""

from dataclasses import dataclass, field
from itertools import product
from math import comb

from gmpy2 import mpq

from .errors import (IrrationalScalingError, NotNormalFormError, PreconditionError,
                     SearchExhaustedError, TruncationError, UmbilicError, ValidationError)
from .group import identity_sigma, validate_sigma
from .hermitian import check_normal_form, hermitian_form, laplacian
from .maps import Hypersurface
from .normalize import normalize
from .numbers import gauss_sqrt, gr, q_sqrt, sum_of_two_squares
from .series import EXACT, RealSeries

A_STEP, SCALE_STEP, R_STEP = "a-step", "scale-step", "r-step"


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)  # (sigma, reason, params)
    final: Hypersurface = None

    def sigmas(self):
        return [s for s, _, _ in self.steps]


def _require_normal(M):
    rep = check_normal_form(M)
    if not rep.is_normal:
        kinds = sorted({k for k, _, _ in rep.violations})
        raise NotNormalFormError(f"surface is not in normal form ({', '.join(kinds)})")


def _rest(M):
    return M.F - hermitian_form(M.sig, M.K)


def _slice(M, s, t):
    """F_st(z, zbar, 0) as an exact polynomial."""
    return _rest(M).bidegree_component(s, t).at_u_zero().with_truncation(EXACT)


def is_umbilic_origin(M):
    _require_normal(M)
    if M.n == 1:
        if M.K < 6:
            raise TruncationError("umbilicity in dimension 3 needs truncation >= 6")
        return _slice(M, 4, 2).is_zero() and _slice(M, 2, 4).is_zero()
    if M.K < 4:
        raise TruncationError("umbilicity needs truncation >= 4")
    return _slice(M, 2, 2).is_zero()


def translate_along_u(M, u0):
    """F(z, zbar, u + u0), expanding each u-power exactly (the input is taken as a polynomial)."""
    u0 = mpq(u0)
    lay = M.F.lay
    out = {}
    for key, (re, im) in M.F._t.items():
        e = lay.exps(key)
        k = e[-1]
        for j in range(k + 1):
            f = comb(k, j) * u0 ** (k - j)
            if not f:
                continue
            nk = lay.key(e[:-1] + (j,))
            r0, i0 = out.get(nk, (mpq(0), mpq(0)))
            out[nk] = (r0 + f * re, i0 + f * im)
    out = {k: v for k, v in out.items() if v[0] or v[1]}
    return Hypersurface(M.sig, RealSeries._raw(M.n, out, M.K))


def lowest_weight(M):
    """Least weight of a nonzero nonquadratic term, or None when flat through the truncation."""
    return _rest(M).min_weight()


def lowest_order(M):
    """Least s + t over the nonquadratic terms F_st (u-powers ignored), or None when flat."""
    bd = _rest(M).bidegrees()
    return min(s + t for s, t in bd) if bd else None


def spherical_to_order(M, K=None):
    """True iff the normal form with identity initial value is the quadric through weight K."""
    K = M.K if K is None else K
    res = normalize(M, identity_sigma(M.sig), K)
    return _rest(res.surface).is_zero()


# weight lowering ---------------------------------------------------------------------

def _candidate_values():
    vals = [gr(1), gr(-1), gr(0, 1), gr(0, -1), gr(mpq(1, 2)), gr(mpq(-1, 2)),
            gr(1, 1), gr(1, -1), gr(2), gr(0, 2)]
    return vals


def candidate_vectors(n, limit):
    """Nonzero vectors with small Gaussian entries in a fixed order."""
    vals = [gr(0)] + _candidate_values()
    count = 0
    for width in range(1, len(vals) + 1):
        for vec in product(vals[:width], repeat=n):
            if not any(vec):
                continue
            if width > 1 and vals[width - 1] not in vec:
                continue
            yield list(vec)
            count += 1
            if count >= limit:
                return


def lower_weight(M, K=None, max_tries=200):
    """Find a with lowest_order(N_(I,a,1,0)(M)) = lowest_order(M) - 1."""
    _require_normal(M)
    K = M.K if K is None else K
    if K > M.K:
        raise TruncationError(f"surface known through weight {M.K}, asked for {K}")
    k = lowest_order(M)
    if k is None:
        raise PreconditionError("surface is flat through the truncation")
    if k < 7:
        raise PreconditionError(f"lowest order {k} is below 7")
    top = _rest(M).at_u_zero()
    if not any(s + t == k for s, t in top.bidegrees()):
        raise PreconditionError(f"order-{k} part vanishes at u = 0; translate along u first")
    if K < k + 1:
        raise TruncationError(f"lowering from order {k} needs truncation >= {k + 1}")
    n = M.n
    ident = [[gr(int(i == j)) for j in range(n)] for i in range(n)]
    for a in candidate_vectors(n, max_tries):
        sigma = validate_sigma(ident, a, 1, 0, M.sig)
        out = normalize(M, sigma, K).surface
        if lowest_order(out) == k - 1:
            return a, out
    raise SearchExhaustedError(f"no vector among the first {max_tries} candidates lowers the order")


# Moser reduction (dimension 3) -------------------------------------------------------

def _coeff(M, I, J, k=0):
    return M.F.coeff(I, J, k)


def moser_invariants(M):
    """b, c, d at u = 0 and the u z^4 zbar^2 coefficient e."""
    return {"b": _coeff(M, (4,), (2,)), "c": _coeff(M, (5,), (2,)),
            "d": _coeff(M, (4,), (3,)), "e": _coeff(M, (4,), (2,), 1)}


def moser_alpha(b):
    """alpha with alpha^3 conj(alpha) = b, so the scaled coefficient becomes 1."""
    b = gr(b)
    if not b:
        raise UmbilicError("b = 0")
    mod = q_sqrt(b.abs2())          # |b|
    root = q_sqrt(mod)              # |alpha|^2
    return gauss_sqrt(b / root)


def moser_reduce(M, variant="f43"):
    if M.n != 1:
        raise ValidationError("Moser reduction is for n = 1")
    if variant not in ("f43", "f52"):
        raise ValidationError(f"unknown variant {variant!r}")
    _require_normal(M)
    K = M.K
    if K < 8:
        raise TruncationError("Moser reduction needs truncation >= 8")
    sig = M.sig
    inv = moser_invariants(M)
    b = inv["b"]
    if not b:
        raise UmbilicError("origin is umbilic: F42(z, zbar, 0) = 0")
    trace = ReductionTrace()
    if variant == "f43":
        a = gr(0, 3) * inv["d"] / (b * 2)
    else:
        a = -(gr(0, 1) * inv["c"].conj()) / (b.conj() * 2)
    s1 = validate_sigma([[1]], [a], 1, 0, sig)
    M1 = normalize(M, s1, K).surface
    trace.steps.append((s1, A_STEP, {"a": a}))

    b1 = moser_invariants(M1)["b"]
    alpha = moser_alpha(b1)
    s2 = validate_sigma([[alpha]], [0], alpha.abs2(), 0, sig)
    M2 = normalize(M1, s2, K).surface
    trace.steps.append((s2, SCALE_STEP, {"alpha": alpha}))

    e = moser_invariants(M2)["e"]
    r = e.re / 4
    s3 = validate_sigma([[1]], [0], 1, r, sig)
    M3 = normalize(M2, s3, K).surface
    trace.steps.append((s3, R_STEP, {"r": r}))
    trace.final = M3
    return trace


def moser_reduced(M, variant="f43"):
    """The reduced-form conditions for a dimension-3 normal form."""
    inv = moser_invariants(M)
    other = inv["d"] if variant == "f43" else inv["c"]
    return inv["b"] == gr(1) and inv["e"].re == 0 and not other


# Webster reduction (n >= 2) ----------------------------------------------------------

def webster_invariants(M):
    """Y = Delta^4 (F22)^2|0, Y' = d/du of it at 0, X_z = Delta^4(F22 dF23/dzbar^z)|0."""
    if M.K < 6:
        raise TruncationError("Webster invariants need truncation >= 6")
    sig = M.sig
    rest = _rest(M)
    F22 = rest.bidegree_component(2, 2)
    P0 = F22.u_power_component(0).with_truncation(EXACT)
    P1 = F22.u_power_component(1).d_u().with_truncation(EXACT)
    Q0 = rest.bidegree_component(2, 3).at_u_zero().with_truncation(EXACT)
    Y = _constant(laplacian(P0 * P0, sig, 4))
    Yp = _constant(laplacian(P0 * P1 * 2, sig, 4))
    X = [_constant(laplacian(P0 * Q0.d_zbar(z), sig, 4)) for z in range(M.n)]
    return {"Y": Y.re, "Yp": Yp.re, "X": X}


def _constant(s):
    return s.coeff((0,) * s.n, (0,) * s.n, 0)


def webster_a(inv, sig):
    """a^z = -(i/2) eps_z X_z / Y; the a-step moves X_z by -2i eps_z a^z Y."""
    Y = inv["Y"]
    return [gr(0, mpq(-1, 2)) * sig.eps(z) * x / Y for z, x in enumerate(inv["X"])]


def _scalar_with_norm(rho):
    """c with |c|^2 = rho: sqrt(rho) when rational, else a Gaussian rational."""
    try:
        return gr(q_sqrt(rho))
    except IrrationalScalingError:
        return sum_of_two_squares(rho)


def webster_reduce(M):
    if M.n < 2:
        raise ValidationError("Webster reduction is for n >= 2")
    _require_normal(M)
    K = M.K
    sig, n = M.sig, M.n
    inv = webster_invariants(M)
    if not inv["Y"]:
        raise PreconditionError("Delta^4 (F22)^2 vanishes at the origin")
    trace = ReductionTrace()
    ident = [[gr(int(i == j)) for j in range(n)] for i in range(n)]
    a = webster_a(inv, sig)
    s1 = validate_sigma(ident, a, 1, 0, sig)
    M1 = normalize(M, s1, K).surface
    trace.steps.append((s1, A_STEP, {"a": a}))

    inv1 = webster_invariants(M1)
    Y = inv1["Y"]
    rho = q_sqrt(abs(Y))
    c = _scalar_with_norm(rho)
    C = [[c if i == j else gr(0) for j in range(n)] for i in range(n)]
    s2 = validate_sigma(C, [0] * n, rho, 0, sig)
    M2 = normalize(M1, s2, K).surface
    trace.steps.append((s2, SCALE_STEP, {"rho": rho, "c": c}))

    # after scaling Y = +-1, so Y'/(4Y) = sign(Y) Y'_old / (4 rho^3)
    inv2 = webster_invariants(M2)
    r = inv2["Yp"] / (4 * inv2["Y"])
    s3 = validate_sigma(ident, [0] * n, 1, r, sig)
    M3 = normalize(M2, s3, K).surface
    trace.steps.append((s3, R_STEP, {"r": r}))
    trace.final = M3
    return trace


def webster_reduced(M):
    inv = webster_invariants(M)
    return abs(inv["Y"]) == 1 and inv["Yp"] == 0 and not any(inv["X"])
