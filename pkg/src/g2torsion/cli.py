"""Command-line front end: ``g2torsion <command> ...``.

Exit codes: 0 success, 1 failed checks, 2 classification outside the theorem
hypotheses or a usage error, 3 malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from . import _linalg as la
from .classify import classify, classify6
from .exterior import Multivector
from .g2 import is_g2
from .report import (RunConfig, classification_markdown, hodge_sign_fault, run_suite,
                     suite_markdown, suite_report, zoo_markdown)
from .su3 import CubeRootFallback
from .torsion import HomogeneousModel, modified_torsion_flatness
from .zoo import CASES, PointModel, build_case, hopf_models, s3_model, sp2_model, verify_all

MODE_ENV = "G2TORSION_MODE"

EXIT_OK, EXIT_FAIL, EXIT_OUTSIDE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    """Unreadable or malformed input file."""


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> RunConfig:
    return RunConfig(mode=args.mode, tol=args.tol, seed=args.seed, output_format=args.format)


def _parse_value(text: str):
    text = text.strip()
    if text[:1] in "[{":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"parameter value {text!r}: {exc.msg} at column {exc.colno}")
    return text


def _parse_params(pairs: list[str], extras: list[str]) -> dict:
    """``k=v`` items plus loose ``--k v`` / ``--k=v`` options."""
    out = {}
    for item in pairs:
        if "=" not in item:
            raise InputError(f"parameter {item!r} is not of the form key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = _parse_value(v)
    i = 0
    while i < len(extras):
        tok = extras[i]
        if not tok.startswith("--"):
            raise InputError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extras):
                raise InputError(f"option {tok} needs a value")
            val = extras[i + 1]
            i += 2
        out[key.replace("-", "_")] = _parse_value(val)
    return out


def _load_model(path: str) -> PointModel:
    data = load_json(path)
    try:
        return PointModel.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


# -- commands -------------------------------------------------------------------

def cmd_g2_check(args, cfg: RunConfig) -> int:
    data = load_json(args.form)
    try:
        phi = Multivector.from_dict(data.get("phi", data))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.form}: {exc}") from exc
    if cfg.mode == "float":
        phi = phi.to_float()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CubeRootFallback)
        chk = is_g2(phi, cfg.tol)
    _emit(dumps(chk.to_dict()), args.out)
    return EXIT_OK if chk.is_g2 else EXIT_FAIL


def cmd_zoo_build(args, cfg: RunConfig, extras: list[str]) -> int:
    params = _parse_params(args.params or [], extras)
    try:
        model = build_case(args.case, **params)
    except TypeError as exc:
        raise InputError(f"bad parameters for case {args.case}: {exc}") from exc
    if cfg.mode == "float":
        model = model.to_float()
    _emit(dumps(model.to_dict()), args.out)
    return EXIT_OK


def cmd_zoo_verify_all(args, cfg: RunConfig) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CubeRootFallback)
        rows = verify_all(cfg.tol)
    if cfg.output_format == "md":
        _emit(zoo_markdown(rows), args.out)
    else:
        _emit(dumps({"rows": rows, "ok": all(r["ok"] for r in rows)}), args.out)
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAIL


def cmd_zoo_homogeneous(args, cfg: RunConfig, extras: list[str]) -> int:
    params = _parse_params(args.params or [], extras)
    if args.name == "s3":
        model = s3_model(params.get("a", 1))
    elif args.name == "hopf-base":
        model = hopf_models()[1]
    elif args.name == "sp2":
        model = sp2_model(params.get("delta", 1), params.get("s", 1)).model
    else:
        model = build_case("4a", a=params.get("a", 1)).homogeneous
    _emit(dumps(model.to_dict()), args.out)
    return EXIT_OK


def cmd_classify(args, cfg: RunConfig) -> int:
    model = _load_model(args.model)
    if cfg.mode == "float":
        model = model.to_float()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CubeRootFallback)
        rep = classify(model, cfg.tol) if model.dim == 7 else classify6(model, cfg.tol)
    data = rep.to_dict()
    fmt = "md" if args.md else "json" if args.json else cfg.output_format
    _emit(classification_markdown(data) if fmt == "md" else dumps(data), args.out)
    return EXIT_OK if rep.resolved else EXIT_OUTSIDE


def _curvature_payload(R, tol) -> dict:
    n = R.dim
    comps = []
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            low = R.lowered(a, b)
            for c in range(1, n + 1):
                for d in range(c + 1, n + 1):
                    v = low[c - 1, d - 1]
                    if not la.is_zero(v, tol):
                        comps.append([a, b, c, d, _scalar(v)])
    Ric = R.ricci()
    return {"is_zero": R.is_zero(), "components": comps,
            "ricci": [[_scalar(x) for x in row] for row in Ric], "scalar": _scalar(R.scalar())}


def _scalar(v):
    return str(v) if la.is_exact_scalar(v) else float(v)


def _load_homogeneous(path: str, tol: float) -> HomogeneousModel:
    data = load_json(path)
    if isinstance(data, dict) and data.get("kind") == "point_model":
        data = data.get("homogeneous")
        if data is None:
            raise InputError(f"{path}: point model carries no homogeneous companion")
    try:
        return HomogeneousModel.from_dict(data, tol)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_curvature(args, cfg: RunConfig) -> int:
    model = _load_homogeneous(args.model, cfg.tol)
    out = {"connection": args.connection}
    if args.connection == "tau-modified":
        if args.x is None or args.y is None:
            raise InputError("tau-modified needs --x and --y")
        x, y = la.rational(args.x), la.rational(args.y)
        lam = None if args.lam is None else la.rational(args.lam)
        vertical = [int(v) for v in args.vertical.split(",")]
        rep = modified_torsion_flatness(model, x, y, vertical, lam)
        out["flatness"] = {k: _scalar(v) if not isinstance(v, bool) else v
                           for k, v in rep.items()}
        volV = Multivector.basis(model.mdim, tuple(sorted(vertical)))
        R = model.curvature("tau", model.torsion + rep["lambda"] * volV)
    else:
        R = model.curvature("g" if args.connection == "g" else "tau")
    out.update(_curvature_payload(R, cfg.tol))
    _emit(dumps(out), args.out)
    return EXIT_OK


def cmd_verify_lemmas(args, cfg: RunConfig) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CubeRootFallback)
        if args.inject_fault == "hodge-sign":
            with hodge_sign_fault():
                results = run_suite(cfg)
        else:
            results = run_suite(cfg)
    report = suite_report(cfg, results)
    _emit(suite_markdown(report) if cfg.output_format == "md" else dumps(report), args.out)
    return EXIT_OK if report["summary"]["ok"] else EXIT_FAIL


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("exact", "float"), default=argparse.SUPPRESS,
                        help=f"arithmetic mode (default from ${MODE_ENV}, else exact)")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("json", "md"), default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output to this path")

    p = argparse.ArgumentParser(prog="g2torsion", parents=[common],
                                description="G2-structures with parallel skew torsion.")
    sub = p.add_subparsers(dest="command", required=True)

    g2 = sub.add_parser("g2", parents=[common], help="G2 form utilities")
    g2sub = g2.add_subparsers(dest="g2_command", required=True)
    chk = g2sub.add_parser("check", parents=[common], help="is this 3-form a G2 form?")
    chk.add_argument("form", help="JSON file with a 3-form (or a point model)")

    zoo = sub.add_parser("zoo", parents=[common], help="model zoo")
    zsub = zoo.add_subparsers(dest="zoo_command", required=True)
    build = zsub.add_parser("build", parents=[common], help="build a model for a case")
    build.add_argument("case", choices=sorted(CASES))
    build.add_argument("--params", nargs="*", metavar="KEY=VALUE")
    zsub.add_parser("verify-all", parents=[common], help="verify every grid model")
    hom = zsub.add_parser("homogeneous", parents=[common], help="emit a homogeneous model")
    hom.add_argument("name", choices=("s3", "hopf-base", "sp2", "space-form"))
    hom.add_argument("--params", nargs="*", metavar="KEY=VALUE")

    cl = sub.add_parser("classify", parents=[common], help="classify a point model")
    cl.add_argument("model")
    grp = cl.add_mutually_exclusive_group()
    grp.add_argument("--json", action="store_true")
    grp.add_argument("--md", action="store_true")

    cu = sub.add_parser("curvature", parents=[common], help="curvature of a homogeneous model")
    cu.add_argument("model")
    cu.add_argument("--connection", choices=("g", "tau", "tau-modified"), default="tau")
    cu.add_argument("--x")
    cu.add_argument("--y")
    cu.add_argument("--lam")
    cu.add_argument("--vertical", default="1,2,3")

    vl = sub.add_parser("verify-lemmas", parents=[common], help="run the identity suite")
    vl.add_argument("--inject-fault", choices=("hodge-sign",),
                    help="negative control: corrupt an operation and expect failures")
    return p


def _finalize(args) -> argparse.Namespace:
    defaults = {"mode": os.environ.get(MODE_ENV, "exact"), "tol": 1e-9, "seed": 0,
                "format": "json", "out": None}
    for k, v in defaults.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    return args


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, extras = parser.parse_known_args(argv)
    args = _finalize(args)
    allows_extras = args.command == "zoo" and args.zoo_command in ("build", "homogeneous")
    if extras and not allows_extras:
        parser.error("unrecognized arguments: " + " ".join(extras))
    try:
        cfg = _config(args)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        if args.command == "g2":
            return cmd_g2_check(args, cfg)
        if args.command == "zoo":
            if args.zoo_command == "build":
                return cmd_zoo_build(args, cfg, extras)
            if args.zoo_command == "homogeneous":
                return cmd_zoo_homogeneous(args, cfg, extras)
            return cmd_zoo_verify_all(args, cfg)
        if args.command == "classify":
            return cmd_classify(args, cfg)
        if args.command == "curvature":
            return cmd_curvature(args, cfg)
        return cmd_verify_lemmas(args, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
