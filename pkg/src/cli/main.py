"""
GPFP Toolkit - command line.

    python app.py pdf data/specs/fp2.json --grid 0.2:5.8:101
    python app.py cumulants data/specs/fp2.json --n 5 --exact
    python app.py hankel --eta 0.15 --order 2
    python app.py threshold
    python app.py ui-verify data/specs/fgig_1_4_0.json --power 2
    python app.py repro fig3 --points 200
    python app.py sample data/specs/fp2.json --count 1000

Reports go to standard output (JSON, or CSV with ``--output csv``); tables
(pdf, repro, sample) are always CSV. Logs, ``--explain`` text and errors go
to standard error. Exit codes: 0 ok, 2 usage or malformed input, 3
normalization or tolerance failure or an uncertified UI verdict, 4 exact
path unavailable or outside the proven regime, 5 UI violation witness.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.cli.schemas import load_spec_file
from src.core import dist_core, fid_check
from src.core.nc_lattice import moments_to_cumulants
from src.holomorphic.ui_verifier import contour_trace_frame, ui_verify
from src.models.analysis_result import UI_CONSISTENT, UI_INCONCLUSIVE, UI_VIOLATION
from src.models.sequences import jsonable
from src.utils.config import RunConfig, load_config
from src.utils.errors import DomainError, GPFPError
from src.utils.explainer import explain_fid, explain_sweep, explain_threshold, explain_ui
from src.utils.numbers import to_exact
from src.utils.parallel import resolve_threads

logger = logging.getLogger(__name__)

CSV_FLOAT = "%.17g"
FIGURES = {"fig2": "sigma-inverse", "fig3": "eta"}
UI_EXIT_CODES = {UI_CONSISTENT: 0, UI_INCONCLUSIVE: 3, UI_VIOLATION: 5}


# ── Output helpers ────────────────────────────────────────────────


def _emit_json(data: Any) -> None:
    sys.stdout.write(json.dumps(data, sort_keys=True, indent=2) + "\n")


def _emit_csv(frame: pd.DataFrame, path: Optional[str] = None) -> None:
    if path is None:
        frame.to_csv(sys.stdout, index=False, float_format=CSV_FLOAT, lineterminator="\n")
    else:
        frame.to_csv(path, index=False, float_format=CSV_FLOAT, lineterminator="\n")


def _explain(args: argparse.Namespace, text: str) -> None:
    if args.explain:
        sys.stderr.write(text if text.endswith("\n") else text + "\n")


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise DomainError(f"grid must read lo:hi:n, got {text!r}") from exc
    if n < 1:
        raise DomainError("grid needs at least one point")
    if n > 1 and not hi > lo:
        raise DomainError("grid needs lo < hi")
    return np.linspace(lo, hi, n)


def _load(args: argparse.Namespace):
    spec = load_spec_file(args.spec)
    power = getattr(args, "power", None)
    if power is None or float(power) == 1.0:
        return spec
    return dist_core.make_power(spec, float(power))


# ── Subcommands ───────────────────────────────────────────────────


def cmd_pdf(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = load_spec_file(args.spec)
    x = _parse_grid(args.grid)
    if args.power is None or float(args.power) == 1.0:
        values = dist_core.gpfp_pdf(spec, x)
    else:
        values = dist_core.power_pdf(spec, float(args.power), x)
    _emit_csv(pd.DataFrame({"x": x, "pdf": np.atleast_1d(values)}))
    return 0


def cmd_cumulants(args: argparse.Namespace, cfg: RunConfig) -> int:
    dist = _load(args)
    if args.n < 1:
        raise DomainError("--n must be at least 1")
    if args.mode == "auto":
        exact = getattr(dist, "exact", None) is not None
    else:
        exact = args.mode == "exact"
    moments = fid_check.pipeline_moments(dist, args.n, exact, cfg.rule())
    kappas = moments_to_cumulants(moments, provenance="exact-moments" if exact else "quadrature-moments")
    label = getattr(dist, "label", "")
    if cfg.output == "csv":
        _emit_csv(pd.DataFrame({
            "n": list(range(1, args.n + 1)),
            "moment": [jsonable(m) for m in moments],
            "cumulant": [jsonable(k) for k in kappas.values],
        }))
    else:
        _emit_json({
            "label": label,
            "method": "exact" if exact else "quadrature",
            "moments": [jsonable(m) for m in moments],
            "cumulants": [jsonable(k) for k in kappas.values],
        })
    return 0


def cmd_hankel(args: argparse.Namespace, cfg: RunConfig) -> int:
    if args.eta is not None or args.sigma_inv is not None:
        kind = "eta" if args.eta is not None else "sigma-inverse"
        alpha2 = to_exact(args.eta if args.eta is not None else args.sigma_inv)
        if args.order <= 2:
            kappas = fid_check.cumulants_eta(alpha2) if kind == "eta" else fid_check.cumulants_sigma_inverse(alpha2)
            report = fid_check.fid_necessary(kappas, args.order, measure=kind)
        else:
            measure = dist_core.eta_measure(alpha2) if kind == "eta" else fid_check.sigma_inverse_measure(alpha2)
            report = fid_check.fid_necessary(measure, args.order, measure=kind)
        report.alpha2 = float(alpha2)
    elif args.spec is not None:
        dist = _load(args)
        report = fid_check.fid_necessary(dist, args.order, exact=args.mode != "quad")
    else:
        raise DomainError("hankel needs a spec file, --eta or --sigma-inv")
    if cfg.output == "csv":
        _emit_csv(pd.DataFrame([report.to_dict()]))
    else:
        _emit_json(report.to_dict())
    _explain(args, explain_fid(report))
    return 0


def cmd_threshold(args: argparse.Namespace, cfg: RunConfig) -> int:
    result = fid_check.eta_threshold(args.tol_root)
    data = result.to_dict()
    if cfg.output == "csv":
        _emit_csv(pd.DataFrame([{
            "root": result.root, "lo": result.bracket[0], "hi": result.bracket[1], "tol": result.tol,
        }]))
    else:
        _emit_json(data)
    _explain(args, explain_threshold(result))
    return 0


def cmd_ui_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    spec = load_spec_file(args.spec)
    dist = dist_core.make_power(spec, float(args.power))
    epsilon = args.epsilon if args.epsilon is not None else cfg.epsilon
    report = ui_verify(
        dist,
        epsilon=epsilon,
        probes=cfg.probes,
        threads=resolve_threads(cfg.threads),
        force=args.force,
        rule=cfg.rule(),
        keep_trace=args.trace is not None,
    )
    if args.trace is not None:
        _emit_csv(contour_trace_frame(report), args.trace)
    if cfg.output == "csv":
        _emit_csv(pd.DataFrame({
            "w_re": [w.real for w in report.probe_points],
            "w_im": [w.imag for w in report.probe_points],
            "winding": report.windings,
        }))
    else:
        _emit_json(report.to_dict())
    _explain(args, explain_ui(report))
    return UI_EXIT_CODES[report.verdict]


def cmd_repro(args: argparse.Namespace, cfg: RunConfig) -> int:
    kind = FIGURES[args.figure]
    rows = fid_check.sweep(kind, args.points)
    _emit_csv(pd.DataFrame(rows, columns=["alpha2", "det"]))
    _explain(args, explain_sweep(kind, rows))
    return 0


def cmd_sample(args: argparse.Namespace, cfg: RunConfig) -> int:
    dist = _load(args)
    draws = dist_core.sample(dist, cfg.seed, args.count)
    _emit_csv(pd.DataFrame({"x": draws}))
    return 0


# ── Parser ────────────────────────────────────────────────────────


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML/JSON configuration file (default: config.yaml if present)")
    common.add_argument("--tol", type=float, help="Quadrature tolerance")
    common.add_argument("--quad-nodes", type=int, dest="quad_nodes", help="Starting quadrature node count")
    common.add_argument("--probes", type=int, help="Probe count for ui-verify")
    common.add_argument("--seed", type=int, help="Random seed for sampling")
    common.add_argument("--threads", help="Worker threads or 'auto'")
    common.add_argument("--output", choices=["json", "csv"], help="Report format")
    common.add_argument("--explain", action="store_true", help="Human-readable summary on stderr")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v INFO, -vv DEBUG")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="gpfp", description="Free cumulants, Hankel tests and UI checks for GPFP laws."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pdf", parents=[common], help="Density on a grid (CSV x,pdf)")
    p.add_argument("spec", help="Spec JSON file")
    p.add_argument("--grid", required=True, help="lo:hi:n")
    p.add_argument("--power", type=float, help="Density of X^r instead of X")
    p.set_defaults(handler=cmd_pdf)

    p = sub.add_parser("cumulants", parents=[common], help="Moments and free cumulants")
    p.add_argument("spec", help="Spec JSON file")
    p.add_argument("--n", type=int, required=True, help="Highest order")
    p.add_argument("--power", type=float, help="Cumulants of X^r (quadrature only)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact", help="Exact rational moments")
    mode.add_argument("--quad", dest="mode", action="store_const", const="quad", help="Quadrature moments")
    p.set_defaults(handler=cmd_cumulants, mode="auto")

    p = sub.add_parser("hankel", parents=[common], help="Hankel-determinant FID test")
    p.add_argument("spec", nargs="?", help="Spec JSON file")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--eta", help="eta_{1-2a,a} at alpha2 = a")
    src.add_argument("--sigma-inv", dest="sigma_inv", help="inverse of sigma_{1-2a,a} at alpha2 = a")
    p.add_argument("--order", type=int, default=2, help="Leading Hankel orders to test (default: 2)")
    p.add_argument("--power", type=float, help="Test X^r (quadrature cumulants)")
    p.add_argument("--quad", dest="mode", action="store_const", const="quad", help="Force quadrature cumulants")
    p.set_defaults(handler=cmd_hankel, mode="auto")

    p = sub.add_parser("threshold", parents=[common], help="Sign change of the eta determinant")
    p.add_argument("--tol-root", type=float, default=1e-9, dest="tol_root", help="Bracket width (default: 1e-9)")
    p.set_defaults(handler=cmd_threshold)

    p = sub.add_parser("ui-verify", parents=[common], help="Argument-principle UI check")
    p.add_argument("spec", help="Spec JSON file")
    p.add_argument("--power", type=float, default=1.0, help="Exponent r, |r| >= 1 (default: 1)")
    p.add_argument("--epsilon", type=float, help="Probe annulus size (default from config)")
    p.add_argument("--trace", help="Write the contour trace CSV here")
    p.add_argument("--force", action="store_true", help="Run outside the proven regime")
    p.set_defaults(handler=cmd_ui_verify)

    p = sub.add_parser("repro", parents=[common], help="Determinant sweeps (CSV alpha2,det)")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.add_argument("--points", type=int, default=200, help="Grid points in (0, 1/2) (default: 200)")
    p.set_defaults(handler=cmd_repro)

    p = sub.add_parser("sample", parents=[common], help="Inverse-CDF samples (CSV x)")
    p.add_argument("spec", help="Spec JSON file")
    p.add_argument("--count", type=int, default=1000, help="Number of draws (default: 1000)")
    p.add_argument("--power", type=float, help="Sample X^r")
    p.set_defaults(handler=cmd_sample)
    return parser


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    threads = args.threads
    if threads is not None and threads != "auto":
        try:
            threads = int(threads)
        except ValueError as exc:
            raise DomainError(f"--threads must be an integer or 'auto', got {threads!r}") from exc
    return {
        "tol": args.tol,
        "quad_nodes": args.quad_nodes,
        "probes": args.probes,
        "seed": args.seed,
        "threads": threads,
        "output": args.output,
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _setup_logging(args.verbose)
    try:
        cfg = load_config(args.config, _overrides(args))
        return args.handler(args, cfg)
    except GPFPError as exc:
        sys.stderr.write(exc.one_line() + "\n")
        logger.debug("failure", exc_info=True)
        return exc.exit_code


def run(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))


if __name__ == "__main__":
    run()
