"""Command-line front-end

Subcommands:
    verify      one point of the identity
    corollary   central values over an index range
    qexp        build or inspect a coefficient cache
    oracle      special-function and orbital-quadrature cross-checks
    scan        a (weight, index) grid with a report file

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage error,
3 computation error.
"""

import argparse
import json
import logging
import math
import re
import sys
from importlib import metadata
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from config import ToleranceConfig
from errors import ConfigError, RegionError, UnsupportedWeightError, VerificationError
from geometric import MatrixOrbit, SpectralParams, orbital_closed_form, orbital_quadrature_oracle
from modforms import (SUPPORTED_WEIGHTS, eigenform, eigenform_from_cache, format_qexp, load_qexp,
                      qexp_digest, save_qexp)
from precision import PRECISIONS, get_context, resolve_precision
from specialfn import gamma, hyp2f1, hyp2f1_euler_oracle, Hyp2F1Args, lattice_sum_check, zeta
from verify import format_reports, scan, verify_corollary, verify_identity, write_reports

logger = logging.getLogger(__name__)

DISTRIBUTION = "rtf-moment-verify"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_COMPUTATION = 3

DEFAULT_S1 = "0.07+0.11i"
DEFAULT_S2 = "-0.13+0.05i"

ORACLE_ORBITS = (MatrixOrbit(2, 1, 1, 1, 1), MatrixOrbit(1, 1, 1, 1, 2), MatrixOrbit(1, 2, 1, 1, 3),
                 MatrixOrbit(3, 1, 2, 1, 1), MatrixOrbit(2, 1, 1, 2, 2), MatrixOrbit(1, 3, 1, 2, 3))


def parse_complex(text: str) -> complex:
    """'a+bi' with optional signs and exponents, e.g. 0.07+0.11i, -2e-3i, 0.3"""
    cleaned = text.strip().replace(" ", "")
    if not cleaned or "j" in cleaned.lower():
        raise argparse.ArgumentTypeError(f"invalid complex number '{text}'")
    try:
        value = complex(cleaned.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid complex number '{text}'") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise argparse.ArgumentTypeError(f"complex number '{text}' is not finite")
    return value


def parse_index_range(text: str) -> range:
    """'a..b' inclusive, or a single index"""
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
        else:
            low = high = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid index range '{text}', expected a..b") from None
    if low < 1 or high < low:
        raise argparse.ArgumentTypeError(f"index range '{text}' must satisfy 1 <= a <= b")
    return range(low, high + 1)


def parse_weights(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid weight list '{text}'") from None


def _version() -> str:
    """Version string from src/__init__.py"""
    source = Path(__file__).with_name("__init__.py")
    if source.exists():
        match = re.search(r'^__version__ = "([^"]+)"', source.read_text(encoding="utf-8"), re.M)
        if match:
            return match.group(1)
    try:
        return metadata.version(DISTRIBUTION)
    except metadata.PackageNotFoundError:
        return "unknown"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    common.add_argument("--config", help="tolerance config JSON (default ~/.rtf_verify_config.json)")
    common.add_argument("--precision", choices=PRECISIONS, help="arithmetic backend")
    common.add_argument("--tol", type=float, help="identity tolerance")
    common.add_argument("--series-tol", type=float, help="error-series truncation tolerance")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--output", "-o", help="report file (default stdout)")
    output.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="rtf-verify",
                                     description="Numerical check of the second-moment trace formula")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common, output], help="one point of the identity")
    p.add_argument("--weight", "-k", type=int, required=True)
    p.add_argument("--index", "-n", type=int, required=True)
    p.add_argument("--s1", type=parse_complex, default=parse_complex(DEFAULT_S1))
    p.add_argument("--s2", type=parse_complex, default=parse_complex(DEFAULT_S2))
    p.add_argument("--cache", help="QEXP coefficient cache for the weight")

    p = sub.add_parser("corollary", parents=[common, output], help="central values over an index range")
    p.add_argument("--weight", "-k", type=int, required=True)
    p.add_argument("--index-range", type=parse_index_range, default=parse_index_range("1..5"))
    p.add_argument("--cache", help="QEXP coefficient cache for the weight")

    p = sub.add_parser("qexp", help="build or inspect a coefficient cache")
    actions = p.add_subparsers(dest="action", required=True)
    build = actions.add_parser("build", parents=[common])
    build.add_argument("--weight", "-k", type=int, required=True)
    build.add_argument("--length", type=int, help="number of coefficients")
    build.add_argument("--output", "-o", help="cache file (default stdout)")
    show = actions.add_parser("show", parents=[common])
    show.add_argument("cache", help="QEXP cache file")
    show.add_argument("--count", type=int, default=10, help="coefficients to print")
    show.add_argument("--check", action="store_true", help="compare against a fresh expansion")

    p = sub.add_parser("oracle", parents=[common], help="independent cross-checks")
    p.add_argument("--weight", "-k", type=int, default=12)
    p.add_argument("--s1", type=parse_complex, default=parse_complex(DEFAULT_S1))
    p.add_argument("--s2", type=parse_complex, default=parse_complex(DEFAULT_S2))
    p.add_argument("--orbits", type=int, default=2, help="orbital quadrature samples (0 skips)")

    p = sub.add_parser("scan", parents=[common, output], help="grid of weights and indices")
    p.add_argument("--weights", type=parse_weights, default=sorted(SUPPORTED_WEIGHTS))
    p.add_argument("--index-range", type=parse_index_range, default=parse_index_range("1..5"))
    p.add_argument("--s1", type=parse_complex, default=parse_complex(DEFAULT_S1))
    p.add_argument("--s2", type=parse_complex, default=parse_complex(DEFAULT_S2))
    p.add_argument("--origin", action="store_true", help="also scan the central point (0, 0)")
    p.add_argument("--workers", type=int, help="worker processes")
    return parser


def _setup_logging(verbose: bool):
    # status lines (✓ / ℹ️) go to stderr, reports to stdout or --output
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(message)s", stream=sys.stderr, force=True)


def _load_config(args) -> ToleranceConfig:
    cfg = ToleranceConfig.load(args.config)
    precision = resolve_precision(args.precision, cfg.precision)
    return cfg.replace(precision=precision, identity_tol=args.tol, series_tol=args.series_tol,
                       workers=getattr(args, "workers", None))


def _emit(args, reports) -> None:
    if args.output:
        write_reports(args.output, reports, args.format)
    else:
        sys.stdout.write(format_reports(reports, args.format))


def _exit_for(reports) -> int:
    if any(r.error for r in reports):
        return EXIT_COMPUTATION
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def _form_for(args, k: int, cfg: ToleranceConfig):
    if getattr(args, "cache", None):
        return eigenform_from_cache(args.cache, k)
    return None


def cmd_verify(args, cfg: ToleranceConfig) -> int:
    p = SpectralParams(args.weight, args.index, args.s1, args.s2).validate()
    report = verify_identity(p, cfg, _form_for(args, p.k, cfg))
    _emit(args, [report])
    return _exit_for([report])


def cmd_corollary(args, cfg: ToleranceConfig) -> int:
    SpectralParams(args.weight, 1).validate()
    form = _form_for(args, args.weight, cfg)
    reports = [verify_corollary(args.weight, n, cfg, form) for n in args.index_range]
    _emit(args, reports)
    return _exit_for(reports)


def cmd_qexp(args, cfg: ToleranceConfig) -> int:
    if args.action == "build":
        f = eigenform(args.weight, args.length or cfg.qexp_length, cfg.qexp_cap)
        if args.output:
            save_qexp(f.qexp, args.output)
            print(f"✓ weight {f.weight}, {f.length} coefficients, id {qexp_digest(f.qexp)}")
        else:
            sys.stdout.write(format_qexp(f.qexp))
        return EXIT_OK
    qexp = load_qexp(args.cache)
    print(f"weight {qexp.weight}, {qexp.count} coefficients, id {qexp_digest(qexp)}")
    for n in range(1, min(args.count, qexp.count) + 1):
        print(f"  a({n}) = {qexp[n]}")
    if args.check:
        fresh = eigenform(qexp.weight, qexp.count, max(cfg.qexp_cap, qexp.count)).qexp
        if fresh.coeffs != qexp.coeffs:
            print("✗ cache disagrees with a fresh expansion")
            return EXIT_FAILED
        print("✓ cache matches a fresh expansion")
    return EXIT_OK


def _relative(a, b) -> float:
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


def oracle_checks(k: int, s1: complex, s2: complex, orbits: int, ctx) -> List[dict]:
    """Residuals of the independent cross-checks, each with its threshold"""
    rng = np.random.default_rng(20240601)
    results = []

    def record(name, residual, threshold):
        results.append({"check": name, "residual": float(residual), "threshold": threshold,
                        "pass": bool(residual < threshold)})

    worst = 0.0
    for x, y in rng.uniform([-5.0, -5.0], [5.0, 5.0], size=(20, 2)):
        z = complex(x, y)
        lhs = gamma(z, ctx) * gamma(1 - z, ctx)
        rhs = ctx.pi / ctx.sin(ctx.pi * z)
        worst = max(worst, _relative(lhs, rhs))
    record("gamma reflection", worst, 1e-12)

    worst = 0.0
    for t in (3.0, 7.5, 14.134725, 21.0, 30.0):
        s = ctx.mpc(0.5, t)
        chi = (ctx.mpf(2) ** s * ctx.pi ** (s - 1) * ctx.sin(ctx.pi * s / 2) * gamma(1 - s, ctx))
        worst = max(worst, abs(complex(zeta(s, ctx)) - complex(chi * zeta(1 - s, ctx)))
                    / max(1.0, abs(complex(zeta(s, ctx)))))
    record("zeta functional equation", worst, 1e-11)

    worst = 0.0
    for a, b, c, x in ((0.3 + 0.2j, 1.5, 3.1, 0.6), (6.0, 5.9, 12.0, -0.4),
                       (2.5 - 0.3j, 0.8, 2.2, 0.9), (1.0, 2.0, 4.5, -3.0)):
        value = hyp2f1(Hyp2F1Args(a, b, c, x), ctx).value
        worst = max(worst, _relative(value, hyp2f1_euler_oracle(a, b, c, x)))
    record("2F1 Euler integral", worst, 1e-9)

    worst = max(lattice_sum_check(z, k) for z in (0.1 + 0.9j, -0.3 + 1.1j, 0.45 + 0.7j, 0.2 + 1.5j, 0.0 + 1.0j))
    record("lattice sum", worst, 1e-10)

    for orbit in ORACLE_ORBITS[:max(orbits, 0)]:
        closed = orbital_closed_form(orbit, k, s1, s2, ctx)
        numeric = orbital_quadrature_oracle(orbit, k, s1, s2)
        record(f"orbit {(orbit.a, orbit.b, orbit.c, orbit.d)} cell {orbit.cell}",
               _relative(closed, numeric), 1e-6)
    return results


def cmd_oracle(args, cfg: ToleranceConfig) -> int:
    if args.weight % 2 or args.weight < 4:
        raise UnsupportedWeightError(f"unsupported weight {args.weight} for the oracle checks")
    results = oracle_checks(args.weight, args.s1, args.s2, args.orbits, get_context(cfg.precision))
    print(json.dumps(results, indent=2))
    for item in results:
        logger.info("%s %s: %.3e (threshold %.0e)", "✓" if item["pass"] else "✗",
                    item["check"], item["residual"], item["threshold"])
    return EXIT_OK if all(item["pass"] for item in results) else EXIT_FAILED


def cmd_scan(args, cfg: ToleranceConfig) -> int:
    grid = []
    for k in args.weights:
        for n in args.index_range:
            grid.append(SpectralParams(k, n, args.s1, args.s2))
            if args.origin:
                grid.append(SpectralParams(k, n))
    for p in grid:
        if p.k not in SUPPORTED_WEIGHTS:
            raise UnsupportedWeightError(f"unsupported weight {p.k}")
    reports = scan(grid, cfg)
    _emit(args, reports)
    return _exit_for(reports)


COMMANDS = {"verify": cmd_verify, "corollary": cmd_corollary, "qexp": cmd_qexp,
            "oracle": cmd_oracle, "scan": cmd_scan}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse, dispatch and map failures onto exit codes"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    _setup_logging(args.verbose)
    try:
        cfg = _load_config(args)
        return COMMANDS[args.command](args, cfg)
    except UnsupportedWeightError as exc:
        print(f"✗ unsupported weight: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, RegionError) as exc:
        print(f"✗ {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(json.dumps({"error": exc.to_dict()}, indent=2))
        print(f"✗ {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
