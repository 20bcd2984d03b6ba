"""Command line interface: ``muf <command> [flags]``.

Exit codes: 0 when the run verified or found what it was asked for
(an obstruction verdict is a result, so it also exits 0), 2 when a
verification failed or a search found nothing, 1 on usage or input errors.
"""

import argparse
import json
import logging
import shlex
import sys
import time
from dataclasses import asdict
from fractions import Fraction

import numpy as np

from . import __version__
from .decomposition import (
    CONCLUSION_TOL,
    RESIDUAL_TOL,
    T_ZERO,
    VERIFIED,
    decomposition_residual,
    theorem1_report,
)
from .frames import design2_defect, info_completeness, muf_relation_check, sic_check
from .io import FrameFileError, load_frames, save_branch, save_frames
from .kernels import BACKEND
from .obstruction import basis_vector, evading_fiducial, fourier_fiducials, prop4_obstruction
from .search import SearchConfig, continuation_sweep, multistart_search, refine_sic, worker_count
from .weyl import context, twirl_coefficient_form, twirl_conjugation

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
WH_ORDERING = "wh-row-major (a1, a2)"


class UsageError(Exception):
    pass


def parse_t(text):
    """Accept decimals and fractions such as ``1/3``."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid t value {text!r}") from None


def _config(args, t=None):
    try:
        return SearchConfig(
            d=args.d,
            t=args.t if t is None else t,
            ansatz=args.ansatz,
            restarts=args.restarts,
            master_seed=args.seed,
            max_iterations=args.max_iters,
            success_tolerance=args.tol,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config_dict(cfg):
    return {k: v for k, v in asdict(cfg).items()}


def _max_projector_gap(pair):
    Px, Py = pair.x.projectors(), pair.y.projectors()
    return float(np.max(np.abs(Px - Py)))


def cmd_verify(args):
    try:
        pair = load_frames(args.input)
    except FrameFileError as exc:
        raise UsageError(str(exc)) from None
    t = args.t if args.t is not None else pair.t
    if t is None:
        raise UsageError("the frame file has no t; pass --t")
    pair = pair.with_t(t)
    tol = args.tol if args.tol_given else RESIDUAL_TOL
    if abs(t) < T_ZERO:
        residual = decomposition_residual(pair)
        rel = muf_relation_check(pair)
        ranks = (info_completeness(pair.x)[0], info_completeness(pair.y)[0])
        ok = residual < tol and max(rel.max_offdiag_dev, rel.max_diag_dev) < CONCLUSION_TOL
        payload = {
            "verdict": "VERIFIED (t=0 mode: IC reported, not enforced)" if ok else "FAILED (t=0 mode)",
            "t": t,
            "residual_frobenius": residual,
            "max_offdiag_dev": rel.max_offdiag_dev,
            "max_diag_dev": rel.max_diag_dev,
            "ic_rank": list(ranks),
        }
        return (EXIT_OK if ok else EXIT_FAIL), payload
    report = theorem1_report(pair, tol=tol)
    payload = {"t": t, **report.as_dict()}
    if report.verdict == VERIFIED:
        payload["verdict"] = "VERIFIED"
        return EXIT_OK, payload
    payload["verdict"] = "FAILED (" + ", ".join(report.failures) + ")"
    return EXIT_FAIL, payload


def _search_payload(cfg, res):
    out = res.as_dict()
    if res.found and abs(cfg.t) >= T_ZERO:
        out["theorem1_verdict"] = theorem1_report(res.best_pair).verdict
    return out


def _save_result(args, cfg, res):
    if args.output:
        ordering = WH_ORDERING if cfg.ansatz != "general" else None
        save_frames(res.best_pair, args.output, ordering=ordering, meta=res.as_dict())


def cmd_search(args):
    if args.t is None:
        raise UsageError("--t is required")
    cfg = _config(args)
    res = multistart_search(cfg)
    _save_result(args, cfg, res)
    return (EXIT_OK if res.found else EXIT_FAIL), {"config": _config_dict(cfg), **_search_payload(cfg, res)}


def cmd_sic(args):
    args.ansatz = "covariant"
    cfg = _config(args, t=1.0 / (args.d + 1))
    res = multistart_search(cfg)
    raw_sic = sic_check(res.best_pair.x)
    if res.found:
        res = refine_sic(res, cfg)
    _save_result(args, cfg, res)
    payload = {"config": _config_dict(cfg), **_search_payload(cfg, res)}
    payload["sic_check_before_refinement"] = raw_sic
    payload["sic_check"] = sic_check(res.best_pair.x)
    payload["design2_defect"] = design2_defect(res.best_pair.x)
    payload["max_projector_gap_xy"] = _max_projector_gap(res.best_pair)
    ok = res.found and payload["sic_check"] < 1e-6
    return (EXIT_OK if ok else EXIT_FAIL), payload


def cmd_sweep(args):
    cfg = _config(args, t=args.t_start)
    start = multistart_search(cfg)
    if not start.found:
        payload = {"config": _config_dict(cfg), "start": start.as_dict(), "accepted": 0}
        return EXIT_FAIL, payload
    branch = continuation_sweep(args.d, args.t_start, args.t_end, args.steps, cfg, start=start)
    if args.output:
        save_branch(branch, args.output, ordering=WH_ORDERING if cfg.ansatz == "covariant" else None)
    complete = abs(branch[-1].t - args.t_end) < 1e-12
    payload = {
        "config": _config_dict(cfg),
        "t_start": args.t_start,
        "t_end": args.t_end,
        "accepted": len(branch),
        "reached_t": branch[-1].t,
        "complete": complete,
        "max_loss": max(r.best_loss for r in branch),
    }
    return (EXIT_OK if complete else EXIT_FAIL), payload


def cmd_twirl_check(args):
    rng = np.random.default_rng(args.seed)
    ctx = context(args.d)
    D = args.d**2
    worst = 0.0
    for _ in range(args.trials):
        X = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
        lhs, rhs = twirl_conjugation(ctx, X), twirl_coefficient_form(ctx, X)
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / np.linalg.norm(X)))
    ok = worst < 1e-10
    payload = {"d": args.d, "trials": args.trials, "max_relative_deviation": worst}
    return (EXIT_OK if ok else EXIT_FAIL), payload


def cmd_obstruction(args):
    if args.pair == "fourier":
        x, y = fourier_fiducials(args.d)
    else:
        x, y = basis_vector(args.d), evading_fiducial(args.d, args.seed)
    verdict = prop4_obstruction(x, y)
    payload = {
        "d": args.d,
        "pair": args.pair,
        "verdict": verdict.summary(),
        "obstructed": verdict.obstructed,
        "witnesses": [list(a) for a in verdict.witnesses],
        "residual_t0": verdict.residual,
    }
    return EXIT_OK, payload


def build_parser():
    parser = argparse.ArgumentParser(prog="muf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, search=True):
        p.add_argument("--json", action="store_true", help="emit the run report as one JSON document")
        p.add_argument("-v", "--verbose", action="store_true")
        if search:
            p.add_argument("--d", type=int, required=True)
            p.add_argument("--ansatz", choices=["general", "covariant"], default="general")
            p.add_argument("--restarts", type=int, default=100)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--max-iters", type=int, default=2000)
            p.add_argument("--tol", type=float, default=1e-12, help="success tolerance on the loss")
            p.add_argument("--output", help="write the best pair (or branch) to this file")

    p = sub.add_parser("verify", help="check a frame file against the decomposition")
    common(p, search=False)
    p.add_argument("--input", required=True)
    p.add_argument("--t", type=parse_t, help="override the file's t")
    p.add_argument("--tol", type=float, default=None, help="residual tolerance (Frobenius)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="multistart search for a pair at one t")
    common(p)
    p.add_argument("--t", type=parse_t)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sic", help="covariant search at t = 1/(d+1) with SIC diagnostics")
    common(p)
    p.set_defaults(func=cmd_sic)

    p = sub.add_parser("sweep", help="continue a solution branch in t")
    common(p)
    p.add_argument("--t-start", type=parse_t, required=True)
    p.add_argument("--t-end", type=parse_t, required=True)
    p.add_argument("--steps", type=int, default=32)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("twirl-check", help="compare both forms of the WH twirl on random operators")
    common(p, search=False)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_twirl_check)

    p = sub.add_parser("obstruction", help="t = 0 obstruction for a covariant starting pair")
    common(p, search=False)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--pair", choices=["fourier", "evading"], default="fourier")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_obstruction)
    return parser


def _flatten(prefix, value, lines):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, lines)
    else:
        lines.append(f"{prefix}: {value}")


def _format_text(report):
    lines = []
    _flatten("", report, lines)
    return "\n".join(lines)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    if args.command == "verify":
        args.tol_given = args.tol is not None
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    start = time.perf_counter()
    try:
        code, payload = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = {
        "command": "muf " + shlex.join(argv),
        "version": __version__,
        "backend": BACKEND,
        "workers": worker_count(),
        "master_seed": getattr(args, "seed", None),
        "result": payload,
        "wall_time": round(time.perf_counter() - start, 6),
    }
    if args.json:
        print(json.dumps(report, indent=2, default=float))
    else:
        print(_format_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
