"""Command-line front end.

Every subcommand prints one JSON document (or its ``key: value`` rendering
with ``--format human``) and exits with 0 when the checked statement
holds, 1 when it was checked and fails, and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

import numpy as np

from .algebra import AlgebraError, format_poly, format_scalar, parse_scalar
from .ballmaps import FAMILIES, BallMap, BallMapError, family, is_linearly_full, is_proper
from .eds import EdsError, ParseError, check_closure, parse_system, rank1_system, serialize_system, su_maurer_cartan
from .eds.builtins import SABOTAGE
from .jets import JetError, random_sphere_point, sff_from_map
from .sff import SffError, SffTensor, numeric_rank, rank_report

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _fractions(text: str) -> list[Fraction]:
    try:
        return [Fraction(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"cannot parse rational list {text!r}") from None


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True)
    lines = []
    for key in sorted(doc):
        val = doc[key]
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
        lines.append(f"{key}: {val}")
    return "\n".join(lines)


# subcommands


def cmd_family(args) -> tuple[dict, int]:
    y = _fractions(args.y) if args.y else None
    s = Fraction(args.s) if args.s is not None else None
    F = family(args.kind, args.n, N=args.N, mu=args.mu, y=y, s=s)
    return F.to_dict(), EXIT_OK


def _load_map(path: str) -> BallMap:
    return BallMap.from_json(_read(path))


def cmd_verify_proper(args) -> tuple[dict, int]:
    F = _load_map(args.map)
    ok, q = is_proper(F)
    doc = {"proper": ok, "quotient": format_poly(q) if ok else None, "n": F.n, "N": F.N}
    if args.full:
        if F.params():
            doc["linearly_full"] = None
        else:
            full, witness = is_linearly_full(F)
            doc["linearly_full"] = full
            if witness is not None:
                a, b = witness
                doc["witness"] = {"a": [format_scalar(x) for x in a], "b": format_scalar(b)}
    return doc, EXIT_OK if ok else EXIT_FALSE


def cmd_iwatani(args) -> tuple[dict, int]:
    H = SffTensor.from_json(_read(args.tensor))
    if not H.exact:
        raise InputError("tensor entries must be exact scalars")
    rep = rank_report(H)
    doc = rep.to_dict()
    return doc, EXIT_OK if rep.bochner_flat and rep.bound_ok else EXIT_FALSE


def _parse_point(text: str):
    try:
        return [parse_scalar(t.strip()) for t in text.split(",")]
    except AlgebraError as exc:
        raise InputError(f"bad point: {exc}") from None


def cmd_sff(args) -> tuple[dict, int]:
    F = _load_map(args.map)
    if args.point:
        p = _parse_point(args.point)
    else:
        p = random_sphere_point(F.n, np.random.default_rng(args.seed))
    res = sff_from_map(F, p, tolerance=args.tolerance)
    nr = numeric_rank(res.H, args.tolerance)
    H = np.asarray(res.H.H, dtype=complex)
    entries = []
    m, n, _ = H.shape
    for a in range(m):
        for i in range(n):
            for j in range(i, n):
                if abs(H[a, i, j]) > args.tolerance:
                    entries.append({"alpha": a + 1, "i": i + 1, "j": j + 1, "re": H[a, i, j].real, "im": H[a, i, j].imag})
    doc = {
        "point": [format_scalar(x) for x in p],
        "n": n,
        "m": m,
        "entries": entries,
        "rank": nr.rank,
        "h_eigenvalues": [round(float(x), 12) + 0.0 for x in nr.eigenvalues],
        "flat_defect": nr.flat_defect,
        "norm": nr.norm,
        "tolerance": args.tolerance,
    }
    return doc, EXIT_OK


def _scenario_text(name: str) -> str:
    try:
        return resources.files("crgap.eds").joinpath("scenarios", name).read_text(encoding="utf-8")
    except (FileNotFoundError, OSError):
        raise InputError(f"no shipped scenario {name!r}") from None


def cmd_eds(args) -> tuple[dict | str, int]:
    if args.eds_cmd == "check":
        if args.file.startswith("scenario:"):
            text = _scenario_text(args.file.split(":", 1)[1])
        else:
            text = _read(args.file)
        sysm = parse_system(text)
    else:
        if args.scenario == "su":
            if args.N is None:
                raise InputError("--N is required for the su scenario")
            sysm = su_maurer_cartan(args.N)
        else:
            if args.n is None or args.r is None:
                raise InputError("--n and --r are required for the rank1 scenario")
            sysm = rank1_system(args.n, args.r, args.sabotage)
        if args.emit:
            return serialize_system(sysm), EXIT_OK
    rep = check_closure(sysm)
    doc = {"system": sysm.name, **rep.to_dict()}
    return doc, EXIT_OK if rep.all_zero else EXIT_FALSE


# parser


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _tol(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crgap", description="Exact checks for proper holomorphic ball maps.")
    ap.add_argument("--format", choices=("json", "human"), default="json")
    # also accepted after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "human"), default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="cmd", required=True)

    f = sub.add_parser("family", parents=[common], help="print a member of a built-in map family")
    f.add_argument("--kind", choices=FAMILIES, required=True)
    f.add_argument("--n", type=_positive, required=True)
    f.add_argument("--N", type=_positive)
    f.add_argument("--mu", type=_positive)
    f.add_argument("--y", help="comma-separated rationals Y_2..Y_mu (or Y_1..Y_mu)")
    f.add_argument("--s", help="rational s for dangelo_c; omit for symbolic (c, s)")
    f.set_defaults(func=cmd_family)

    v = sub.add_parser("verify-proper", parents=[common], help="check |F|^2 - 1 is divisible by |z|^2 - 1")
    v.add_argument("map", help="map file, or - for standard input")
    v.add_argument("--full", action="store_true", help="also test linear fullness")
    v.set_defaults(func=cmd_verify_proper)

    w = sub.add_parser("iwatani", parents=[common], help="Bochner-flatness, rank and the Iwatani bound of a tensor")
    w.add_argument("tensor", help="tensor file, or - for standard input")
    w.set_defaults(func=cmd_iwatani)

    s = sub.add_parser("sff", parents=[common], help="second fundamental form of a map at a boundary point")
    s.add_argument("map")
    s.add_argument("--point", help="comma-separated exact coordinates on the unit sphere")
    s.add_argument("--seed", type=int, default=0, help="seed for a random rational point")
    s.add_argument("--tolerance", type=_tol, default=1e-9)
    s.set_defaults(func=cmd_sff)

    e = sub.add_parser("eds", parents=[common], help="d^2 = 0 closure checks")
    esub = e.add_subparsers(dest="eds_cmd", required=True)
    ec = esub.add_parser("check", parents=[common], help="check a system file (or scenario:NAME for a shipped one)")
    ec.add_argument("file")
    eb = esub.add_parser("builtin", parents=[common], help="check a built-in system")
    eb.add_argument("--scenario", choices=("su", "rank1"), required=True)
    eb.add_argument("--N", type=_positive)
    eb.add_argument("--n", type=_positive)
    eb.add_argument("--r", type=_nonneg)
    eb.add_argument("--sabotage", choices=SABOTAGE)
    eb.add_argument("--emit", action="store_true", help="print the system in the text format instead")
    e.set_defaults(func=cmd_eds)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        doc, code = args.func(args)
    except ParseError as exc:
        doc, code = {"error": str(exc), "line": exc.line, "col": exc.col}, EXIT_INPUT
    except (InputError, BallMapError, AlgebraError, SffError, JetError, EdsError, ValueError) as exc:
        doc, code = {"error": str(exc)}, EXIT_INPUT
    if isinstance(doc, str):
        sys.stdout.write(doc)
    else:
        print(_render(doc, args.format))
    if code == EXIT_INPUT and isinstance(doc, dict):
        print(f"crgap: {doc['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
