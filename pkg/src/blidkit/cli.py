"""Command-line driver.

Subcommands:
  extend             germ-extension demo (integral functional on C[0,1])
  borel              jet realization plus a jet-extraction table
  cohomo solve       solve g(Ax) - g(x) = f(x) from a problem file
  cohomo resonances  enumerate resonance relations
  blid show          cutoff / scalar-blid profiles as CSV
  selftest           built-in invariant suite

All outputs land in --out (or $BLIDKIT_OUT, or ./blidkit-out): a JSON
report per run plus CSV sample files.  Exit codes: 0 all checks passed,
1 a check failed or the problem is obstructed, 2 unparseable input.
Reports are byte-identical for a fixed seed.
"""

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from .bump import cutoff_eval, make_cutoff, scalar_blid_eval
from .cohomo import CohomologicalProblem, check_resonances, solve_cohomological
from .errors import BlidkitError, CheckFailed, ParseError, SingularResonance
from .funcspace import GridFunction, c01_blid_map, integral_functional, sup_norm
from .germ import GridSpace, JetSpec, LocalMap, extend_germ, jet_extract, realize_jet
from .polyalg import hompoly_eval
from .selftest import run_selftest

__all__ = ["main"]


def _out_dir(args):
    out = args.out or os.environ.get("BLIDKIT_OUT") or "blidkit-out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path, payload):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")


def _load_json(path):
    if path is None:
        return None
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"input file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"input is not valid JSON: {exc}") from exc


def _cmd_extend(args):
    cfg = _load_json(args.input) or {}
    grid_size = int(cfg.get("grid_size", 200))
    inner = float(cfg.get("inner", 1.0 / 3.0))
    outer = float(cfg.get("outer", 1.0 / 2.0))
    max_norm = float(cfg.get("max_norm", 3.0))
    samples = args.samples or int(cfg.get("samples", 60))
    tau = make_cutoff(inner, outer)

    # ray of scaled profiles through a fixed shape
    base = GridFunction.from_callable(grid_size, lambda t: math.sin(2.0 * math.pi * t))
    f_local = LocalMap(
        lambda x: integral_functional(x),
        validity_radius=outer,
        domain=GridSpace(grid_size),
    )
    F = extend_germ(f_local, c01_blid_map(tau))

    rows = []
    worst_agreement = 0.0
    for s in np.linspace(0.0, max_norm, samples):
        x = s * base
        norm = sup_norm(x)
        extended = F(x)
        if np.max(x.values) < 1.0 - 1e-9:
            raw = integral_functional(x)
        else:
            raw = float("nan")
        if norm < F.agreement_radius:
            worst_agreement = max(worst_agreement, abs(extended - raw))
        rows.append((float(norm), float(raw), float(extended)))
    out = _out_dir(args)
    _write_csv(out / "extend.csv", ["sup_norm", "raw", "extended"], rows)
    report = {
        "grid_size": grid_size,
        "cutoff": {"inner": inner, "outer": outer},
        "agreement_radius": F.agreement_radius,
        "max_disagreement_below_threshold": worst_agreement,
        "samples": samples,
    }
    _write_json(out / "extend.json", report)
    if worst_agreement != 0.0:
        raise CheckFailed(
            f"extension disagrees with the germ below the identity threshold "
            f"({worst_agreement:.3e})"
        )
    print(f"extend: agreement radius {F.agreement_radius:.6g}, exact below threshold")
    return 0


def _cmd_borel(args):
    cfg = _load_json(args.input)
    if cfg is None:
        raise ParseError("borel needs --input with a jet file")
    try:
        jet = JetSpec.from_dict(cfg)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad jet file: {exc}") from exc
    tau_cfg = cfg.get("tau", {})
    tau = make_cutoff(float(tau_cfg.get("inner", 1.0 / 3.0)), float(tau_cfg.get("outer", 1.0 / 2.0)))
    n_dirs = args.samples or int(cfg.get("directions", 20))
    tol = args.tol or 1e-4

    F = realize_jet(jet, tau)
    rng = np.random.default_rng(args.seed)
    dirs = rng.normal(size=(n_dirs, jet.dim))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]

    rows = []
    worst = 0.0
    for n in range(jet.truncation + 1):
        got = np.array([jet_extract(F, d, n)[0] for d in dirs])
        exact = np.array([hompoly_eval(jet.polys[n], d)[0] for d in dirs])
        scale = max(float(np.max(np.abs(exact))), 1e-12)
        err = float(np.max(np.abs(got - exact))) / scale
        worst = max(worst, err)
        for k in range(n_dirs):
            rows.append((n, k, float(got[k]), float(exact[k]), err))
    out = _out_dir(args)
    _write_csv(out / "borel.csv", ["order", "direction", "extracted", "expected", "scale_rel_err"], rows)
    _write_json(
        out / "borel.json",
        {
            "dim": jet.dim,
            "truncation": jet.truncation,
            "sup_bound": F.sup_bound,
            "agreement_radius": F.agreement_radius,
            "worst_scale_rel_err": worst,
            "tolerance": tol,
            "directions": n_dirs,
            "seed": args.seed,
        },
    )
    if worst > tol:
        raise CheckFailed(f"jet extraction off by {worst:.3e} (> {tol:.1e})")
    print(f"borel: worst scale-relative extraction error {worst:.3e}")
    return 0


def _cmd_cohomo_solve(args):
    cfg = _load_json(args.input)
    if cfg is None:
        raise ParseError("cohomo solve needs --input with a problem file")
    problem = CohomologicalProblem.from_dict(cfg)
    tol = args.tol or float(cfg.get("tol", 1e-8))
    box = float(cfg.get("box_halfwidth", 3.0))
    samples = args.samples or 2000
    start = time.perf_counter()
    g, report = solve_cohomological(
        problem, tol=tol, box_halfwidth=box, samples=samples, seed=args.seed
    )
    elapsed = time.perf_counter() - start
    out = _out_dir(args)
    # timings go to stdout only: report files must be byte-identical per seed
    payload = report.to_dict()
    payload["tol"] = tol
    _write_json(out / "cohomo.json", payload)

    rng = np.random.default_rng(args.seed)
    dim = problem.matrix.shape[0]
    f = problem.full_evaluator()
    A = problem.matrix
    rows = []
    for _ in range(min(samples, 200)):
        x = rng.uniform(-box, box, dim)
        rows.append(tuple(float(c) for c in x) + (float(g(A @ x) - g(x) - f(x)),))
    _write_csv(out / "cohomo_residuals.csv", [f"x{i}" for i in range(dim)] + ["residual"], rows)
    if report.global_residual is None or report.global_residual > tol:
        raise CheckFailed(
            f"residual {report.global_residual:.3e} exceeds tolerance {tol:.1e}"
        )
    print(
        f"cohomo solve: residual {report.global_residual:.3e} over "
        f"[-{box}, {box}]^{dim} in {elapsed:.2f}s"
    )
    return 0


def _cmd_cohomo_resonances(args):
    cfg = _load_json(args.input)
    if cfg is None:
        raise ParseError("cohomo resonances needs --input")
    if "eigenvalues" in cfg:
        eigs = [complex(re, im) for re, im in cfg["eigenvalues"]]
    elif "A" in cfg or "matrix" in cfg:
        raw = cfg.get("A", cfg.get("matrix"))
        eigs = [complex(ev) for ev in np.linalg.eigvals(np.asarray(raw, dtype=float))]
    else:
        raise ParseError("resonance input needs 'eigenvalues' or 'A'")
    n_max = args.nmax or int(cfg.get("n_max", 4))
    tol = args.tol or float(cfg.get("tol", 1e-9))
    hits = check_resonances(eigs, n_max, tol)
    out = _out_dir(args)
    _write_json(
        out / "resonances.json",
        {
            "eigenvalues": [[ev.real, ev.imag] for ev in eigs],
            "n_max": n_max,
            "tol": tol,
            "hits": [{"multi_index": list(p), "residual": r} for p, r in hits],
        },
    )
    _write_csv(
        out / "resonances.csv",
        ["multi_index", "residual"],
        [(" ".join(map(str, p)), float(r)) for p, r in hits],
    )
    print(f"resonances: {len(hits)} hit(s) up to degree {n_max}")
    return 0


def _cmd_blid_show(args):
    tau = make_cutoff(args.inner, args.outer)
    n = args.samples or 400
    grid = np.linspace(-1.2 * args.outer, 1.2 * args.outer, n)
    rows = [
        (float(s), cutoff_eval(tau, s), cutoff_eval(tau, float(s), 1), scalar_blid_eval(tau, s))
        for s in grid
    ]
    out = _out_dir(args)
    _write_csv(out / "blid_profile.csv", ["s", "cutoff", "cutoff_derivative", "blid"], rows)
    _write_json(
        out / "blid_profile.json",
        {"inner": args.inner, "outer": args.outer, "samples": n},
    )
    print(f"blid show: wrote {n} profile samples")
    return 0


def _cmd_selftest(args):
    results = run_selftest(seed=args.seed, samples=args.samples)
    out = _out_dir(args)
    _write_json(
        out / "selftest.json",
        {"seed": args.seed, "checks": [r.to_dict() for r in results]},
    )
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    if failed:
        raise CheckFailed(f"{len(failed)} selftest check(s) failed")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(prog="blidkit", description=__doc__)
    parser.set_defaults(out=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol_default=None):
        p.add_argument("--out", help="output directory (default $BLIDKIT_OUT or ./blidkit-out)")
        p.add_argument("--input", help="input JSON file")
        p.add_argument("--tol", type=float, default=tol_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int)

    p = sub.add_parser("extend", help="germ extension demo on discretized C[0,1]")
    common(p)
    p.set_defaults(fn=_cmd_extend)

    p = sub.add_parser("borel", help="jet realization and extraction table")
    common(p)
    p.set_defaults(fn=_cmd_borel)

    cohomo = sub.add_parser("cohomo", help="cohomological equation tools")
    cohomo_sub = cohomo.add_subparsers(dest="subcommand", required=True)
    p = cohomo_sub.add_parser("solve", help="solve g(Ax) - g(x) = f(x)")
    common(p)
    p.set_defaults(fn=_cmd_cohomo_solve)
    p = cohomo_sub.add_parser("resonances", help="enumerate resonance relations")
    common(p)
    p.add_argument("--nmax", type=int)
    p.set_defaults(fn=_cmd_cohomo_resonances)

    blid = sub.add_parser("blid", help="blid profile tools")
    blid_sub = blid.add_subparsers(dest="subcommand", required=True)
    p = blid_sub.add_parser("show", help="emit cutoff/blid profile CSV")
    p.add_argument("--out", help="output directory")
    p.add_argument("--inner", type=float, default=1.0 / 3.0)
    p.add_argument("--outer", type=float, default=1.0 / 2.0)
    p.add_argument("--samples", type=int)
    p.set_defaults(fn=_cmd_blid_show)

    p = sub.add_parser("selftest", help="run the built-in invariant suite")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int)
    p.set_defaults(fn=_cmd_selftest)

    return parser


def _error_report(args, kind, exc):
    try:
        out = _out_dir(args)
        payload = {"error": kind, "message": str(exc)}
        if isinstance(exc, SingularResonance):
            payload["multi_indices"] = [list(p) for p in exc.multi_indices]
            payload["degree"] = exc.degree
        _write_json(out / "error.json", payload)
    except OSError:
        pass
    print(f"blidkit: {kind}: {exc}", file=sys.stderr)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        _error_report(args, "ParseError", exc)
        return 2
    except BlidkitError as exc:
        _error_report(args, type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
