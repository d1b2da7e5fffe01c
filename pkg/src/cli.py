"""
Command-Line Front End for HodgeBound

Subcommands:
- bound: evaluate one upper bound and print the BoundResult
- ball-eig: first Dirichlet eigenvalue of a model-space ball
- spectrum: Hodge Laplacian spectrum of a mesh
- net: eps-net of a mesh with its Bishop covering check
- verify: run verification suites and write a report

Exit codes: 0 success, 1 internal error, 2 validation or hypothesis
failure, 3 mesh quality, 4 verification failure (report still written).
Results go to stdout as JSON; logging goes to stderr.
"""

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from typing import Any, Callable, Dict, List, Optional

from src.bounds import (
    ManifoldClass,
    RicciSignConvention,
    cheng_function_bound,
    connection_laplacian_bound,
    hodge_bound,
    local_dirichlet_bound,
    neg_ricci_bound,
    nonneg_ricci_bound,
    sigma_p_bounds,
    volume_bound,
)
from src.config import DEFAULT_SETTINGS, Settings, load_settings
from src.dec import assemble, hodge_laplacian, solve_spectrum
from src.errors import DomainError, HypothesisError, ToolkitError
from src.mesh import SurfaceMesh, build_eps_net, build_flat_torus, build_icosphere, load_off
from src.spaceform import ModelSpace, ball_dirichlet_eigenvalue, bishop_net_lower_bound
from src.verify import (
    canonical_class,
    check_domain_decomposition,
    check_main_theorem,
    merge_reports,
    net_decomposition_balls,
    quantize,
    write_report,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

CONVENTIONS = {
    "lower": RicciSignConvention.LOWER_BOUND,
    "neg-lower": RicciSignConvention.NEGATIVE_LOWER_BOUND,
}

BOUND_SOURCES = ["thm1.1", "thm1.2", "cor3.3", "cor3.4", "thm3.5", "cor3.7", "lem3.1", "sigma"]
DEFAULT_EPS_LIST = f"{math.pi / 2!r},{math.pi / 3!r}"


def _print_json(payload: Any) -> None:
    print(json.dumps(quantize(payload), sort_keys=True, indent=2))


def parse_mesh(source: str, settings: Settings) -> SurfaceMesh:
    """
    Build a mesh from "torus:m", "icosphere:s" or "off:path".

    Raises:
        DomainError: On an unknown generator or a non-integer parameter
    """
    kind, _, value = source.partition(":")
    if kind == "off" and value:
        return load_off(value)
    if kind in ("torus", "icosphere"):
        try:
            level = int(value)
        except ValueError:
            raise DomainError(f"Invalid mesh parameter: '{value}'. Must be an integer.") from None
        return build_flat_torus(level) if kind == "torus" else build_icosphere(level)
    raise DomainError(f"Invalid mesh: '{source}'. Must be torus:m, icosphere:s or off:path.")


def parse_int_list(text: str, name: str) -> List[int]:
    """Comma-separated integers, e.g. "0,1,2"."""
    try:
        values = [int(part) for part in text.split(",")]
    except ValueError:
        raise DomainError(f"Invalid {name}: '{text}'. Must be comma-separated integers.") from None
    return values


def parse_float_list(text: str, name: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise DomainError(f"Invalid {name}: '{text}'. Must be comma-separated decimals.") from None
    return values


def _manifold_class(args: argparse.Namespace) -> ManifoldClass:
    return ManifoldClass(
        n=args.n,
        xi=args.xi,
        rH=args.rH,
        r0=args.r0,
        D=args.D,
        V=args.V,
        convention=CONVENTIONS[args.convention],
    )


def cmd_bound(args: argparse.Namespace, settings: Settings) -> int:
    mc = _manifold_class(args)
    dispatch: Dict[str, Callable[[], Any]] = {
        "thm1.1": lambda: cheng_function_bound(mc, args.k, settings),
        "thm1.2": lambda: hodge_bound(mc, args.k, args.p, settings),
        "cor3.3": lambda: nonneg_ricci_bound(mc, args.k, args.p),
        "cor3.4": lambda: neg_ricci_bound(mc, args.k, args.p),
        "thm3.5": lambda: volume_bound(mc, args.k, args.p),
        "cor3.7": lambda: connection_laplacian_bound(mc, args.p),
        "lem3.1": lambda: local_dirichlet_bound(mc, _required(args.r, "--r"), args.p, settings),
        "sigma": lambda: sigma_p_bounds(mc, args.p, settings),
    }
    result = dispatch[args.source]()
    if isinstance(result, list):
        _print_json([item.to_dict() for item in result])
    else:
        _print_json(result.to_dict())
    return 0


def _required(value: Optional[float], flag: str) -> float:
    if value is None:
        raise DomainError(f"Missing {flag}.")
    return value


def cmd_ball_eig(args: argparse.Namespace, settings: Settings) -> int:
    if args.tol is not None:
        settings = replace(settings, bisection_rtol=args.tol)
    result = ball_dirichlet_eigenvalue(ModelSpace(args.n, args.xi), args.r, settings)
    _print_json(result.to_dict())
    return 0


def cmd_spectrum(args: argparse.Namespace, settings: Settings) -> int:
    mesh = parse_mesh(args.mesh, settings)
    pencil = hodge_laplacian(assemble(mesh, settings), args.p, args.allow_indefinite)
    result = solve_spectrum(pencil, args.num, tol=args.tol, settings=settings, seed=args.seed)
    payload = result.to_dict()
    payload["mesh"] = mesh.descriptor
    _print_json(payload)
    return 0


def _curvature_of(mesh: SurfaceMesh, xi: Optional[float]) -> Optional[float]:
    if xi is not None:
        return xi
    return {"flat_torus": 0.0, "icosphere": 1.0}.get(mesh.kind)


def cmd_net(args: argparse.Namespace, settings: Settings) -> int:
    mesh = parse_mesh(args.mesh, settings)
    net = build_eps_net(mesh, args.eps)
    payload = net.to_dict()
    payload["mesh"] = mesh.descriptor

    xi = _curvature_of(mesh, args.xi)
    if xi is not None:
        area = mesh.total_area()
        lower = bishop_net_lower_bound(ModelSpace(2, xi), area, args.eps, settings)
        payload["area"] = area
        payload["bishop_lower_bound"] = lower
        payload["bishop_ok"] = net.size >= lower * (1.0 - settings.report_rel_tol)
    _print_json(payload)
    return 0


def _verify_class(mesh: SurfaceMesh, args: argparse.Namespace) -> ManifoldClass:
    if mesh.kind in ("flat_torus", "icosphere") and args.xi is None and args.D is None:
        return canonical_class(mesh, args.rH)
    if args.xi is None or args.D is None or args.rH is None:
        raise HypothesisError(
            f"{mesh.descriptor} needs --xi, --D and --rH for the main suite",
            hypothesis="manifold class",
        )
    return ManifoldClass(2, args.xi, rH=args.rH, D=args.D)


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    p_list = parse_int_list(args.p_list, "--p-list")
    for p in p_list:
        if p not in (0, 1, 2):
            raise DomainError(f"Invalid --p-list entry: {p}. Must be 0, 1 or 2.")
    eps_list = parse_float_list(args.eps_list, "--eps-list")
    if args.seed is not None:
        settings = replace(settings, seed=args.seed)

    mesh = parse_mesh(args.mesh, settings)
    ops = assemble(mesh, settings)
    reports = []

    if args.suite in ("main", "all"):
        mc = _verify_class(mesh, args)
        for p in p_list:
            reports.append(check_main_theorem(mesh, mc, args.k_max, p, args.source, settings, ops))

    if args.suite in ("decomp", "all"):
        for eps in eps_list:
            net, balls = net_decomposition_balls(mesh, eps)
            for p in p_list:
                report = check_domain_decomposition(mesh, balls, args.l, p, settings, ops)
                report.diagnostics["eps"] = eps
                report.diagnostics["net_size"] = net.size
                for row in report.rows:
                    row.extra["eps"] = eps
                reports.append(report)

    report = merge_reports(reports)
    write_report(report, args.out, args.format)
    _print_json({"out": args.out, "summary": report.summary, "warnings": report.warnings})
    return 0 if report.all_passed else 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgebound",
        description="Upper bounds and discrete verification for Hodge Laplacian eigenvalues.",
    )
    parser.add_argument("--config", help="JSON file of setting overrides")
    parser.add_argument(
        "--log-level", default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="stderr log level",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bound = sub.add_parser("bound", help="evaluate an upper bound")
    bound.add_argument("--source", required=True, choices=BOUND_SOURCES)
    bound.add_argument("--n", type=int, default=2)
    bound.add_argument("--xi", type=float, default=0.0)
    bound.add_argument("--convention", choices=sorted(CONVENTIONS), default="lower")
    bound.add_argument("--r0", type=float)
    bound.add_argument("--rH", type=float, help="harmonic radius ('inf' for the rH -> infinity limit)")
    bound.add_argument("--D", type=float, help="diameter")
    bound.add_argument("--V", type=float, help="volume")
    bound.add_argument("--k", type=int, default=1)
    bound.add_argument("--p", type=int, default=0)
    bound.add_argument("--r", type=float, help="ball radius for lem3.1")
    bound.set_defaults(handler=cmd_bound)

    ball = sub.add_parser("ball-eig", help="first Dirichlet eigenvalue of a model ball")
    ball.add_argument("--n", type=int, required=True)
    ball.add_argument("--xi", type=float, required=True)
    ball.add_argument("--r", type=float, required=True)
    ball.add_argument("--tol", type=float, help="relative bisection width")
    ball.set_defaults(handler=cmd_ball_eig)

    spectrum = sub.add_parser("spectrum", help="Hodge Laplacian spectrum of a mesh")
    spectrum.add_argument("--mesh", required=True, help="torus:m, icosphere:s or off:path")
    spectrum.add_argument("--p", type=int, required=True)
    spectrum.add_argument("--num", type=int, required=True)
    spectrum.add_argument("--tol", type=float)
    spectrum.add_argument("--seed", type=int)
    spectrum.add_argument("--allow-indefinite", action="store_true",
                          help="admit negative cotan weights")
    spectrum.set_defaults(handler=cmd_spectrum)

    net = sub.add_parser("net", help="eps-net of a mesh")
    net.add_argument("--mesh", required=True)
    net.add_argument("--eps", type=float, required=True)
    net.add_argument("--xi", type=float, help="curvature for the Bishop check")
    net.set_defaults(handler=cmd_net)

    verify = sub.add_parser("verify", help="run verification suites")
    verify.add_argument("--mesh", required=True)
    verify.add_argument("--suite", choices=["main", "decomp", "all"], default="main")
    verify.add_argument("--k-max", type=int, default=20)
    verify.add_argument("--p-list", default="0,1,2")
    verify.add_argument("--source", choices=["thm1.2", "cor3.3", "cor3.4"], default="thm1.2")
    verify.add_argument("--eps-list", default=DEFAULT_EPS_LIST,
                        help=f"comma-separated decomposition net scales (default {math.pi / 2:.12g},{math.pi / 3:.12g})")
    verify.add_argument("--l", type=int, default=1)
    verify.add_argument("--rH", type=float)
    verify.add_argument("--xi", type=float)
    verify.add_argument("--D", type=float)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--out", required=True)
    verify.add_argument("--format", choices=["json", "csv"], default="json")
    verify.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the subcommand and map failures to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )

    try:
        settings = load_settings(args.config) if args.config else DEFAULT_SETTINGS
        return args.handler(args, settings)
    except HypothesisError as e:
        print(f"error: {e} (hypothesis: {e.hypothesis})", file=sys.stderr)
        return e.exit_code
    except ToolkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except (FileNotFoundError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception:
        logger.exception("Internal error")
        return 1
