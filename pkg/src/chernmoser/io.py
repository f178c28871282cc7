"""JSON file formats for surfaces, maps and initial values.

All rationals are written as "p/q" strings and complex numbers as re/im
pairs.  Terms are emitted in canonical order, so dumping is deterministic
and a canonical file round-trips byte for byte.
"""

import json

from .errors import DimensionMismatch, InvalidSigmaError, TruncationError, ValidationError
from .group import InitialValue, validate_sigma
from .hermitian import Signature
from .maps import HoloMap, Hypersurface
from .numbers import GaussianRational, format_q, parse_q
from .series import EXACT, HoloSeries, RealSeries, layout


def _dumps(obj):
    return json.dumps(obj, indent=2) + "\n"


def _loads(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what}: JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(obj, name, where):
    if not isinstance(obj, dict) or name not in obj:
        raise ValidationError(f"{where}: missing field {name!r}")
    return obj[name]


def _int(x, where, lo=0):
    if not isinstance(x, int) or isinstance(x, bool) or x < lo:
        raise ValidationError(f"{where}: expected an integer >= {lo}, got {x!r}")
    return x


def _index(x, n, where):
    if not isinstance(x, list) or len(x) != n:
        raise DimensionMismatch(f"{where}: expected a list of {n} exponents")
    return tuple(_int(v, where) for v in x)


def _rat(x, where):
    if not isinstance(x, str):
        raise ValidationError(f"{where}: rationals must be \"p/q\" strings, got {x!r}")
    try:
        return parse_q(x, strict=True)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _complex(obj, where):
    return GaussianRational(_rat(_field(obj, "re", where), where + ".re"),
                            _rat(_field(obj, "im", where), where + ".im"))


def _cjson(c):
    c = GaussianRational.coerce(c)
    return {"re": format_q(c.re), "im": format_q(c.im)}


# surfaces ----------------------------------------------------------------------------

def surface_to_obj(M):
    n = M.n
    lay = layout(n, False)
    terms = []
    for key in sorted(M.F._t, key=lay.sort_key):
        e = lay.exps(key)
        re, im = M.F._t[key]
        terms.append({"zi": list(e[:n]), "zbari": list(e[n:2 * n]), "u": e[2 * n],
                      "re": format_q(re), "im": format_q(im)})
    return {"n": n, "e": M.sig.e, "truncation_weight": M.K, "terms": terms}


def surface_from_obj(obj):
    where = "surface"
    n = _int(_field(obj, "n", where), "n", 1)
    e = _int(_field(obj, "e", where), "e", 0)
    K = _int(_field(obj, "truncation_weight", where), "truncation_weight", 0)
    if K > EXACT:
        raise ValidationError(f"truncation_weight {K} exceeds the supported maximum {EXACT}")
    sig = Signature(n, e)
    raw = _field(obj, "terms", where)
    if not isinstance(raw, list):
        raise ValidationError("surface: terms must be a list")
    seen = {}
    for i, t in enumerate(raw):
        w = f"terms[{i}]"
        I = _index(_field(t, "zi", w), n, w + ".zi")
        J = _index(_field(t, "zbari", w), n, w + ".zbari")
        k = _int(_field(t, "u", w), w + ".u")
        c = _complex(t, w)
        wt = sum(I) + sum(J) + 2 * k
        if wt > K:
            raise TruncationError(f"{w}: weight {wt} exceeds truncation_weight {K}")
        if (I, J, k) in seen:
            raise ValidationError(f"{w}: duplicate monomial (also terms[{seen[(I, J, k)][0]}])")
        seen[(I, J, k)] = (i, c)
    for (I, J, k), (i, c) in seen.items():
        partner = seen.get((J, I, k))
        if partner is None:
            if c:
                raise ValidationError(f"terms[{i}]: reality violated, conjugate partner "
                                      f"zi={list(J)} zbari={list(I)} u={k} is missing")
        elif partner[1] != c.conj():
            raise ValidationError(f"terms[{i}]: reality violated, coefficient is not the conjugate "
                                  f"of terms[{partner[0]}]")
    F = RealSeries(n, {m: c for m, (_, c) in seen.items()}, K)
    return Hypersurface(sig, F)


def dump_surface(M):
    return _dumps(surface_to_obj(M))


def load_surface(text):
    return surface_from_obj(_loads(text, "surface"))


# maps ---------------------------------------------------------------------------------

def _holo_terms(h):
    n = h.n
    lay = layout(n, True)
    out = []
    for key in sorted(h._t, key=lay.sort_key):
        e = lay.exps(key)
        re, im = h._t[key]
        out.append({"zi": list(e[:n]), "w": e[n], "re": format_q(re), "im": format_q(im)})
    return out


def _holo_from(raw, n, K, where):
    if not isinstance(raw, list):
        raise ValidationError(f"{where}: expected a list of terms")
    terms = {}
    for i, t in enumerate(raw):
        w = f"{where}[{i}]"
        I = _index(_field(t, "zi", w), n, w + ".zi")
        m = _int(_field(t, "w", w), w + ".w")
        c = _complex(t, w)
        if sum(I) + 2 * m > K:
            raise TruncationError(f"{w}: weight {sum(I) + 2 * m} exceeds the component truncation {K}")
        if (I, m) in terms:
            raise ValidationError(f"{w}: duplicate monomial")
        terms[(I, m)] = c
    return HoloSeries(n, terms, K)


def map_to_obj(phi):
    return {"n": phi.n, "truncation_weight": phi.K,
            "f": [_holo_terms(c) for c in phi.f], "g": _holo_terms(phi.g)}


def map_from_obj(obj):
    n = _int(_field(obj, "n", "map"), "n", 1)
    K = _int(_field(obj, "truncation_weight", "map"), "truncation_weight", 1)
    f = _field(obj, "f", "map")
    if not isinstance(f, list) or len(f) != n:
        raise DimensionMismatch(f"map: f must list {n} components")
    fs = [_holo_from(c, n, K - 1, f"f[{a}]") for a, c in enumerate(f)]
    g = _holo_from(_field(obj, "g", "map"), n, K, "g")
    return HoloMap(fs, g, K)


def dump_map(phi):
    return _dumps(map_to_obj(phi))


def load_map(text):
    return map_from_obj(_loads(text, "map"))


# initial values ------------------------------------------------------------------------

def sigma_to_obj(s):
    return {"n": s.n, "e": s.sig.e,
            "C": [[_cjson(x) for x in row] for row in s.C],
            "a": [_cjson(x) for x in s.a],
            "rho": format_q(s.rho), "r": format_q(s.r)}


def sigma_from_obj(obj):
    where = "sigma"
    n = _int(_field(obj, "n", where), "n", 1)
    e = _int(_field(obj, "e", where), "e", 0)
    sig = Signature(n, e)
    C = _field(obj, "C", where)
    if not isinstance(C, list) or len(C) != n or any(not isinstance(r, list) or len(r) != n for r in C):
        raise InvalidSigmaError(f"sigma: C must be a {n}x{n} matrix")
    C = [[_complex(x, f"C[{i}][{j}]") for j, x in enumerate(row)] for i, row in enumerate(C)]
    a = _field(obj, "a", where)
    if not isinstance(a, list) or len(a) != n:
        raise InvalidSigmaError(f"sigma: a must have {n} entries")
    a = [_complex(x, f"a[{i}]") for i, x in enumerate(a)]
    rho = _rat(_field(obj, "rho", where), "rho")
    r = _rat(_field(obj, "r", where), "r")
    return validate_sigma(C, a, rho, r, sig)


def dump_sigma(s):
    return _dumps(sigma_to_obj(s))


def load_sigma(text):
    return sigma_from_obj(_loads(text, "sigma"))


def parse_and_validate(text):
    """Load whichever object the file describes (surface, map or initial value)."""
    obj = _loads(text, "input")
    if not isinstance(obj, dict):
        raise ValidationError("input: top level must be a JSON object")
    if "terms" in obj:
        return surface_from_obj(obj)
    if "f" in obj and "g" in obj:
        return map_from_obj(obj)
    if "C" in obj:
        return sigma_from_obj(obj)
    raise ValidationError("input: not a surface, map or initial-value file")


def dump(obj):
    if isinstance(obj, Hypersurface):
        return dump_surface(obj)
    if isinstance(obj, HoloMap):
        return dump_map(obj)
    if isinstance(obj, InitialValue):
        return dump_sigma(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
