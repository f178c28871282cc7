"""Command-line interface.

Every command prints a JSON report.  When an emitted file goes to stdout
("-"), the report goes to stderr instead so the stream stays parseable.
Exit codes: 0 success, 1 file or validation error, 2 precondition failure,
3 irrational scaling.
"""

import argparse
import json
import sys

from gmpy2 import mpq

from . import io
from .errors import CRNormalError, NotNormalFormError, TruncationError, ValidationError
from .group import (InitialValue, extract_initial_value, identity_sigma, phi_sigma_series,
                    sigma_compose, sigma_decompose, sigma_inverse)
from .hermitian import check_normal_form
from .maps import HoloMap, Hypersurface, identity_residual, transform_hypersurface
from .normalize import normalize, verify_identity_residual
from .numbers import GaussianRational, format_q
from .umbilic import (is_umbilic_origin, lower_weight, lowest_order, lowest_weight, moser_reduce,
                      moser_reduced, spherical_to_order, translate_along_u, webster_reduce,
                      webster_reduced)


def _jsonable(x):
    if isinstance(x, GaussianRational):
        return {"re": format_q(x.re), "im": format_q(x.im)}
    if isinstance(x, type(mpq(0))):
        return format_q(x)
    if isinstance(x, InitialValue):
        return io.sigma_to_obj(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _read(path):
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None


def _expect(obj, kind, path):
    if not isinstance(obj, kind):
        raise ValidationError(f"{path}: expected a {kind.__name__} file, got {type(obj).__name__}")
    return obj


def _surface(path):
    return _expect(io.parse_and_validate(_read(path)), Hypersurface, path)


def _map(path):
    return _expect(io.parse_and_validate(_read(path)), HoloMap, path)


def _sigma(path):
    return _expect(io.parse_and_validate(_read(path)), InitialValue, path)


class _Run:
    """Collects checks and emitted files for one command."""

    def __init__(self, command):
        self.report = {"command": command, "status": "ok", "checks": [], "result": {}}
        self.to_stdout = False
        self._pending = []

    def check(self, name, ok, **extra):
        self.report["checks"].append({"name": name, "ok": bool(ok), **_jsonable(extra)})
        return ok

    def emit(self, path, text):
        if path is None:
            return
        if path == "-":
            self.to_stdout = True
        self._pending.append((path, text))
        self.report.setdefault("emitted", []).append(path)

    def flush(self, out, err):
        for path, text in self._pending:
            if path == "-":
                out.write(text)
            else:
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(text)
        if any(not c["ok"] for c in self.report["checks"]):
            self.report["status"] = "failed-checks"
        dest = err if self.to_stdout else out
        dest.write(json.dumps(_jsonable(self.report), indent=2) + "\n")


def _weight(args, M):
    K = M.K if args.weight is None else args.weight
    if K > M.K:
        raise TruncationError(f"--weight {K} exceeds the input truncation {M.K}")
    return K


def _normal_checks(run, M, label):
    rep = check_normal_form(M)
    run.check(f"{label}-normal-form", rep.is_normal, violations=rep.summary())
    return rep.is_normal


def cmd_check(args, run):
    obj = io.parse_and_validate(_read(args.file))
    run.check("parse-and-validate", True)
    if isinstance(obj, Hypersurface):
        run.check("levi-form", True, signature=[obj.n, obj.sig.e])
        rep = check_normal_form(obj)
        run.report["result"] = {"kind": "surface", "n": obj.n, "e": obj.sig.e,
                                "truncation_weight": obj.K, "is_normal": rep.is_normal,
                                "violations": rep.summary(), "lowest_weight": lowest_weight(obj)}
    elif isinstance(obj, HoloMap):
        run.report["result"] = {"kind": "map", "n": obj.n, "truncation_weight": obj.K}
    else:
        run.report["result"] = {"kind": "sigma", "sigma": obj}


def cmd_normalize(args, run):
    M = _surface(args.file)
    K = _weight(args, M)
    sigma = identity_sigma(M.sig) if args.identity else _sigma(args.sigma)
    res = normalize(M, sigma, K)
    run.check("identity-residual-zero", verify_identity_residual(M, res).is_zero())
    _normal_checks(run, res.surface, "output")
    if K >= 4:
        run.check("initial-value-recovered", extract_initial_value(res.map, M.sig) == res.sigma)
    run.report["result"] = {"truncation_weight": K, "sigma": res.sigma, "log": res.log,
                            "lowest_weight": lowest_weight(res.surface)}
    run.emit(args.emit_map, io.dump_map(res.map))
    run.emit(args.emit_surface, io.dump_surface(res.surface))


def cmd_transform(args, run):
    M = _surface(args.file)
    phi = _map(args.map)
    image = transform_hypersurface(phi, M)
    K = image.K
    run.check("identity-residual-zero", identity_residual(phi, M.F.truncate(K), image.F, K).is_zero())
    rep = check_normal_form(image)
    run.report["result"] = {"truncation_weight": K, "is_normal": rep.is_normal,
                            "violations": rep.summary()}
    run.emit(args.emit_surface, io.dump_surface(image))


def cmd_phi_sigma(args, run):
    sigma = _sigma(args.sigma)
    phi = phi_sigma_series(sigma, args.weight)
    if args.weight >= 4:
        run.check("initial-value-recovered", extract_initial_value(phi, sigma.sig) == sigma)
    run.report["result"] = {"truncation_weight": args.weight, "sigma": sigma}
    run.emit(args.emit_map, io.dump_map(phi))


def cmd_group(args, run):
    if args.op == "compose":
        if len(args.files) != 2:
            raise ValidationError("compose takes two initial-value files")
        s1, s2 = _sigma(args.files[0]), _sigma(args.files[1])
        out = sigma_compose(s1, s2)
        run.report["result"] = {"product": out}
        run.emit(args.emit, io.dump_sigma(out))
    else:
        if len(args.files) != 1:
            raise ValidationError(f"{args.op} takes one initial-value file")
        s = _sigma(args.files[0])
        if args.op == "invert":
            out = sigma_inverse(s)
            run.check("product-is-identity", sigma_compose(s, out).is_identity())
            run.report["result"] = {"inverse": out}
            run.emit(args.emit, io.dump_sigma(out))
        else:
            psi, lin = sigma_decompose(s)
            run.check("factors-recompose", sigma_compose(lin, psi) == s)
            run.report["result"] = {"psi": psi, "linear": lin}


def cmd_umbilic(args, run):
    M = _surface(args.file)
    if args.at_u is not None:
        u0 = io._rat(args.at_u, "--at-u")
        M = normalize(translate_along_u(M, u0), identity_sigma(M.sig)).surface
        run.report["result"]["at_u"] = format_q(u0)
    run.report["result"]["umbilic"] = is_umbilic_origin(M)


def cmd_reduce(args, run):
    M = _surface(args.file)
    if args.moser:
        trace = moser_reduce(M, args.variant)
        run.check("reduced-conditions", moser_reduced(trace.final, args.variant))
    else:
        trace = webster_reduce(M)
        run.check("reduced-conditions", webster_reduced(trace.final))
    _normal_checks(run, trace.final, "output")
    run.report["result"] = {"steps": [{"step": reason, "sigma": s, "params": p}
                                      for s, reason, p in trace.steps]}
    run.emit(args.emit_surface, io.dump_surface(trace.final))


def cmd_lowest_weight(args, run):
    M = _surface(args.file)
    rep = check_normal_form(M)
    if not rep.is_normal:
        raise NotNormalFormError("lowest weight is an invariant of normal forms only")
    run.check("input-normal-form", True)
    run.report["result"] = {"lowest_weight": lowest_weight(M), "lowest_order": lowest_order(M)}


def cmd_lower_weight(args, run):
    M = _surface(args.file)
    K = _weight(args, M)
    before = lowest_order(M)
    a, out = lower_weight(M, K)
    run.check("order-lowered", lowest_order(out) == before - 1)
    run.report["result"] = {"a": a, "order_before": before, "order_after": lowest_order(out)}
    run.emit(args.emit_surface, io.dump_surface(out))


def cmd_spherical(args, run):
    M = _surface(args.file)
    K = _weight(args, M)
    run.report["result"] = {"truncation_weight": K, "spherical": spherical_to_order(M, K)}


def build_parser():
    p = argparse.ArgumentParser(prog="chernmoser", description="Exact normal forms of real hypersurfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="validate a surface, map or initial-value file")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("normalize", help="normalize a surface")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--sigma")
    g.add_argument("--identity", action="store_true")
    s.add_argument("--weight", type=int)
    s.add_argument("--emit-map")
    s.add_argument("--emit-surface")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("transform", help="push a surface forward by a map")
    s.add_argument("file")
    s.add_argument("--map", required=True)
    s.add_argument("--emit-surface")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("phi-sigma", help="expand the quadric automorphism of an initial value")
    s.add_argument("--sigma", required=True)
    s.add_argument("--weight", type=int, required=True)
    s.add_argument("--emit-map")
    s.set_defaults(func=cmd_phi_sigma)

    s = sub.add_parser("group", help="isotropy group operations")
    s.add_argument("op", choices=["compose", "invert", "decompose"])
    s.add_argument("files", nargs="+")
    s.add_argument("--emit")
    s.set_defaults(func=cmd_group)

    s = sub.add_parser("umbilic", help="decide umbilicity at the origin or at (0, u0)")
    s.add_argument("file")
    s.add_argument("--at-u")
    s.set_defaults(func=cmd_umbilic)

    s = sub.add_parser("reduce", help="reduced normal form at a nonumbilic point")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--moser", action="store_true")
    g.add_argument("--webster", action="store_true")
    s.add_argument("--variant", choices=["f43", "f52"], default="f43")
    s.add_argument("--emit-surface")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("lowest-weight", help="lowest nonquadratic weight of a normal form")
    s.add_argument("file")
    s.set_defaults(func=cmd_lowest_weight)

    s = sub.add_parser("lower-weight", help="search for a renormalization lowering the order by one")
    s.add_argument("file")
    s.add_argument("--weight", type=int)
    s.add_argument("--emit-surface")
    s.set_defaults(func=cmd_lower_weight)

    s = sub.add_parser("spherical", help="flatness of the identity normal form through a weight")
    s.add_argument("file")
    s.add_argument("--weight", type=int)
    s.set_defaults(func=cmd_spherical)
    return p


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    if getattr(args, "weight", None) is not None and args.weight < 0:
        err.write(json.dumps({"status": "error", "error": "ValidationError",
                              "message": "--weight must be nonnegative", "exit_code": 1}) + "\n")
        return 1
    run = _Run(args.command)
    try:
        args.func(args, run)
    except CRNormalError as exc:
        payload = {"command": args.command, "status": "error", "error": type(exc).__name__,
                   "message": str(exc), "exit_code": exc.exit_code}
        radicand = getattr(exc, "radicand", None)
        if radicand is not None:
            payload["radicand"] = _jsonable(radicand)
        err.write(json.dumps(payload, indent=2) + "\n")
        return exc.exit_code
    run.flush(out, err)
    return 0


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
