"""Signature form <z,z>, the trace operator Delta and the normal-form predicate."""

from dataclasses import dataclass, field
from types import SimpleNamespace

from gmpy2 import mpq

from .errors import DegenerateLeviError, ValidationError
from .series import EXACT, RealSeries, layout


@dataclass(frozen=True)
class Signature:
    """<z,z> = |z^1|^2 + ... + |z^e|^2 - |z^{e+1}|^2 - ... - |z^n|^2."""

    n: int
    e: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.e, int) or self.n < 1:
            raise ValidationError(f"bad signature ({self.n}, {self.e})")
        if not (2 * self.e >= self.n and self.e <= self.n and self.e >= 1):
            raise ValidationError(f"signature needs n/2 <= e <= n, got n={self.n}, e={self.e}")

    def eps(self, alpha):
        return 1 if alpha < self.e else -1

    def metric(self):
        return [self.eps(a) for a in range(self.n)]


def hermitian_form(sig, K=EXACT):
    lay = layout(sig.n, False)
    t = {}
    for a in range(sig.n):
        e = [0] * (2 * sig.n + 1)
        e[a] = e[sig.n + a] = 1
        t[lay.key(tuple(e))] = (mpq(sig.eps(a)), mpq(0))
    return RealSeries._raw(sig.n, t, K)


def pairing(zs, ws_conj, sig):
    """sum_a eps_a zs[a] * ws_conj[a] for lists of series."""
    out = None
    for a in range(sig.n):
        term = zs[a] * ws_conj[a] * sig.eps(a)
        out = term if out is None else out + term
    return out


def laplacian(F, sig, times=1):
    """Delta^times F, Delta = sum_a eps_a d^2/dz^a dzbar^a."""
    if F.n != sig.n:
        raise ValidationError(f"series dimension {F.n} does not match signature {sig.n}")
    for _ in range(times):
        out = None
        for a in range(sig.n):
            term = F.d_z(a).d_zbar(a)
            if sig.eps(a) < 0:
                term = -term
            out = term if out is None else out + term
        F = out
    return F


@dataclass
class NormalFormReport:
    is_normal: bool
    violations: list = field(default_factory=list)  # (kind, where, residual series)

    def summary(self):
        return [{"kind": k, "where": list(w) if isinstance(w, tuple) else w} for k, w, _ in self.violations]


def check_levi(F, sig):
    """Raise DegenerateLeviError unless the weight-2 part of F is exactly <z,z>."""
    if F.K < 2:
        raise DegenerateLeviError("truncation below weight 2: Levi form unknown")
    w2 = F.weight_component(2)
    q = hermitian_form(sig, 2)
    if w2 != q:
        raise DegenerateLeviError(
            f"weight-2 part is not the Hermitian form of signature ({sig.n},{sig.e})")
    lay = F.lay
    low = [k for k in F._t if lay.weight(k) < 2]
    if low:
        raise ValidationError("defining series must vanish to second order at 0")


def levi_signature(M, sig=None):
    """Return the declared signature after checking the weight-2 part against it."""
    if sig is None:
        F, sig = M.F, M.sig
    else:
        F = M
    check_levi(F, sig)
    return sig


def check_normal_form(M):
    F, sig = M.F, M.sig
    check_levi(F, sig)
    rest = F - hermitian_form(sig, F.K)
    viol = []
    for s, t in rest.bidegrees():
        if min(s, t) <= 1:
            viol.append(("low-bidegree", (s, t), rest.bidegree_component(s, t)))
    for (s, t), times, kind in (((2, 2), 1, "trace-22"), ((2, 3), 2, "trace-23"), ((3, 3), 3, "trace-33")):
        part = rest.bidegree_component(s, t)
        if part.is_zero():
            continue
        d = laplacian(part, sig, times)
        if not d.is_zero():
            viol.append((kind, (s, t), d))
    return NormalFormReport(not viol, viol)


def is_normal_series(F, sig):
    return check_normal_form(SimpleNamespace(F=F, sig=sig)).is_normal
