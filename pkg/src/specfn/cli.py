"""``specfn`` command line.

    specfn compute psr|wq|wc|wk|region ...
    specfn verify SUITE [--trials N] [--seed S] [--dims 3,4,5] [--tol name=val] ...
    specfn classify-c --C FILE

Exit status: 0 success, 1 suite failure, 2 usage or input error, 3 numeric
backend error.  Reports are JSON; regions are written as CSV, SVG and PNG.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import numrange as nr
from . import pseudospec as ps
from .linalg import BackendError, DimensionError, DomainError, load_matrix
from .regions import region_to_csv, region_to_svg
from .reports import dumps, jsonable
from .suites import SUITES, RunConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BACKEND = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _parse_tols(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(val)
        except ValueError as exc:
            raise UsageError(f"--tol {name}: {val!r} is not a number") from exc
    return out


def _parse_dims(text):
    if text is None:
        return None
    try:
        return [int(d) for d in text.split(",") if d.strip()]
    except ValueError as exc:
        raise UsageError(f"--dims expects comma-separated integers, got {text!r}") from exc


def _need(args, name):
    val = getattr(args, name)
    if val is None:
        raise UsageError(f"--{name.replace('_', '-')} is required here")
    return val


def _out_dir(args) -> Path:
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _emit(obj: dict, args, stem: str) -> None:
    text = json.dumps(jsonable(obj), indent=2) + "\n"
    sys.stdout.write(text)
    if args.out:
        (_out_dir(args) / f"{stem}.json").write_text(text)


def _write_region(region, out: Path, stem: str, title: str, eigenvalues=None) -> dict:
    from .plotting import plot_region

    csv_path, svg_path, png_path = (out / f"{stem}.{ext}" for ext in ("csv", "svg", "png"))
    csv_path.write_text("re,im\n" + region_to_csv(region))
    svg_path.write_text(region_to_svg(region))
    plot_region(region, png_path, title=title, eigenvalues=eigenvalues)
    return {"csv": str(csv_path), "svg": str(svg_path), "png": str(png_path)}


# -- compute -------------------------------------------------------------------------

def cmd_compute(args) -> int:
    rng = np.random.default_rng(args.seed)
    what = args.what
    if what == "psr":
        A = load_matrix(_need(args, "matrix"))
        eps = _need(args, "eps")
        _emit({"value": ps.pseudo_spectral_radius(A, eps), "eps": eps}, args, "psr")
    elif what == "wq":
        C = load_matrix(_need(args, "C"))
        q = _need(args, "q")
        qa, phase = nr.normalize_q(q)
        _emit({"value": nr.q_numerical_radius(C, qa, rng=rng), "q": qa, "phase": phase},
              args, "wq")
    elif what == "wc":
        A = load_matrix(_need(args, "matrix"))
        C = load_matrix(_need(args, "C"))
        res = nr.c_numerical_radius(A, C, rng=rng, return_info=True)
        _emit({"value": res.value, "method": res.method,
               "lower_bound_only": res.lower_bound_only}, args, "wc")
    elif what == "wk":
        A = load_matrix(_need(args, "matrix"))
        k = _need(args, "k")
        _emit({"value": nr.k_numerical_radius(A, k), "k": k}, args, "wk")
    elif what == "region":
        out = _out_dir(args)
        if args.kind == "pseudospectrum":
            A = load_matrix(_need(args, "matrix"))
            eps = _need(args, "eps")
            reg = ps.pseudo_region(A, eps, grid=args.grid)
            files = _write_region(reg, out, "pseudospectrum", f"sigma_eps, eps = {eps:g}",
                                  np.linalg.eigvals(A))
            info = {"kind": "pseudospectrum", "eps": eps, "grid": args.grid,
                    "spacing": reg.spacing, "points": int(reg.points.size),
                    "area": reg.area()}
        else:
            C = load_matrix(_need(args, "C"))
            q = _need(args, "q")
            reg = nr.q_region(C, q, rng=rng, n_discs=max(args.grid * 8, 2000))
            files = _write_region(reg, out, "q_range", f"W_q, q = {q:g}")
            info = {"kind": "q-range", "q": q, "points": int(reg.points.size),
                    "max_modulus": reg.max_modulus()}
        _emit({**info, "files": files}, args, "region")
    return EXIT_OK


# -- verify / classify ---------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    cfg = RunConfig(seed=args.seed, dims=_parse_dims(args.dims), trials=args.trials,
                    tol=_parse_tols(args.tol), out=Path(args.out) if args.out else None,
                    n=args.n, workers=args.workers)
    t0 = time.perf_counter()
    rep = run_suite(args.suite, cfg)
    runtime = time.perf_counter() - t0
    text = dumps(rep)
    out = _out_dir(args)
    path = out / f"{args.suite}.json"
    path.write_text(text)
    # runtime goes to stderr so the report stays byte-identical across runs
    status = "PASS" if rep.passed else "FAIL"
    print(f"{args.suite}: {status} max_violation={rep.max_violation:.3e} "
          f"runtime={runtime:.2f}s report={path}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_classify_c(args) -> int:
    from .plotting import plot_profile

    C = load_matrix(_need(args, "C"))
    rng = np.random.default_rng(args.seed)
    prof = nr.q_profile(C, grid_size=args.grid, rng=rng)
    cond = nr.classify_theorem41_condition(prof)
    out = _out_dir(args)
    (out / "profile.csv").write_text(prof.to_csv())
    plot_profile(prof, out / "profile.png", title=f"condition: {cond.value}")
    obj = {"condition": cond.value, "w0": prof.w0, "w1": prof.w1,
           "argmin": prof.argmin, "argmax": prof.argmax,
           "monotonicity": prof.monotonicity(),
           "profile": [[float(q), float(v)] for q, v in zip(prof.q, prof.values)]}
    text = json.dumps(jsonable(obj), indent=2) + "\n"
    (out / "classify.json").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specfn", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate one functional")
    c.add_argument("what", choices=["psr", "wq", "wc", "wk", "region"])
    c.add_argument("--matrix", help="matrix JSON file (A)")
    c.add_argument("--C", dest="C", help="weight matrix JSON file (C)")
    c.add_argument("--eps", type=float)
    c.add_argument("--q", type=float)
    c.add_argument("--k", type=int)
    c.add_argument("--grid", type=int, default=512)
    c.add_argument("--kind", choices=["pseudospectrum", "qrange"], default="pseudospectrum")
    c.add_argument("--out")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help=", ".join(SUITES))
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--dims")
    v.add_argument("--n", type=int)
    v.add_argument("--tol", action="append", metavar="NAME=VALUE")
    v.add_argument("--workers", type=int)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("classify-c", help="q-profile of C and its condition class")
    k.add_argument("--C", dest="C", required=True)
    k.add_argument("--grid", type=int, default=21)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out")
    k.set_defaults(func=cmd_classify_c)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DomainError, DimensionError, FileNotFoundError, ValueError) as exc:
        print(f"specfn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BackendError, np.linalg.LinAlgError) as exc:
        print(f"specfn: numeric backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
