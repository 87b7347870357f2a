"""Spectral side, residuals, scans and reports"""

import csv
import hashlib
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from config import ToleranceConfig
from errors import VerificationError
from geometric import MomentBreakdown, SpectralParams, geometric_total
from lfunc import L_value, sym2_L1
from modforms import Eigenform, eigenform, hecke_lambda, qexp_digest
from precision import context_name, get_context

logger = logging.getLogger(__name__)

ZERO_SIDE = 1e-10
PROBE_RADIUS = 1e-2
PROBE_POINTS = 8
PROBE_TOL = 1e-5

KIND_IDENTITY = "identity"
KIND_COROLLARY = "corollary"

__all__ = ["ToleranceConfig", "VerificationReport", "ProbeResult", "spectral_total", "verify_identity",
           "verify_corollary", "scan", "probe_removable_singularity", "write_reports", "format_reports"]


def _pair(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


@dataclass
class VerificationReport:
    """Both sides of one instance, residuals and provenance"""
    params: SpectralParams
    kind: str = KIND_IDENTITY
    spectral: Optional[complex] = None
    geometric: Optional[MomentBreakdown] = None
    abs_residual: Optional[float] = None
    rel_residual: Optional[float] = None
    passed: bool = False
    timings: Dict[str, float] = field(default_factory=dict)
    provenance: Dict[str, object] = field(default_factory=dict)
    error: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict(),
                "kind": self.kind,
                "spectral": None if self.spectral is None else _pair(self.spectral),
                "geometric": None if self.geometric is None else self.geometric.to_dict(),
                "residuals": {"abs": self.abs_residual, "rel": self.rel_residual},
                "pass": self.passed,
                "timings": dict(self.timings),
                "provenance": dict(self.provenance),
                "error": self.error}

    def fingerprint(self) -> str:
        """sha256 of the canonical JSON form without timings"""
        data = self.to_dict()
        data.pop("timings")
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _context(cfg: ToleranceConfig, k: int):
    return get_context(cfg.precision_for(k))


def _form(k: int, cfg: ToleranceConfig, form: Optional[Eigenform]) -> Eigenform:
    if form is not None:
        return form
    return eigenform(k, cfg.qexp_length, cfg.qexp_cap)


def spectral_total(p: SpectralParams, cfg: ToleranceConfig, form: Optional[Eigenform] = None) -> complex:
    """(2 pi^2/(k-1)) lambda(n) L(1/2+s1) L(1/2+s2) / L(1, sym^2 f)"""
    ctx = _context(cfg, p.k)
    f = _form(p.k, cfg, form)
    lam = hecke_lambda(f, p.n, ctx)
    first = L_value(f, p.s1, ctx).value
    second = L_value(f, p.s2, ctx).value
    norms = sym2_L1(f, ctx, cap=cfg.quadrature_cap)
    value = 2 * ctx.pi ** 2 / (p.k - 1) * lam * first * second / norms.sym2_at_1
    return complex(value)


def _judge(report: VerificationReport, cfg: ToleranceConfig):
    spectral, total = report.spectral, report.geometric.total
    report.abs_residual = abs(spectral - total)
    report.rel_residual = report.abs_residual / max(abs(spectral), 1e-300)
    if abs(spectral) < ZERO_SIDE:
        report.passed = report.abs_residual < cfg.identity_tol
    else:
        report.passed = report.rel_residual < cfg.identity_tol


def verify_identity(p: SpectralParams, cfg: ToleranceConfig, form: Optional[Eigenform] = None,
                    kind: str = KIND_IDENTITY) -> VerificationReport:
    """Compare both sides at one point; raises on region violations and numerical failures"""
    p.validate()
    ctx = _context(cfg, p.k)
    report = VerificationReport(p, kind)

    start = time.perf_counter()
    f = _form(p.k, cfg, form)
    report.timings["coefficients"] = time.perf_counter() - start

    start = time.perf_counter()
    report.spectral = spectral_total(p, cfg, f)
    report.timings["spectral"] = time.perf_counter() - start

    start = time.perf_counter()
    report.geometric = geometric_total(p, cfg.series_tol, ctx, cfg.series_cap,
                                       cfg.contour_radius, cfg.contour_samples)
    report.timings["geometric"] = time.perf_counter() - start

    report.provenance = {"precision": context_name(ctx),
                         "coefficient_cache": qexp_digest(f.qexp),
                         "coefficients": f.length}
    _judge(report, cfg)
    glyph = "✓" if report.passed else "✗"
    logger.info("%s %s k=%d n=%d s1=%s s2=%s: residual %.3e (rel %.3e)", glyph, kind, p.k, p.n,
                p.s1, p.s2, report.abs_residual, report.rel_residual)
    return report


def verify_corollary(k: int, n: int, cfg: ToleranceConfig, form: Optional[Eigenform] = None) -> VerificationReport:
    """Central values: spectral side at (0,0) against m2_zero + E(n; 0, 0)"""
    return verify_identity(SpectralParams(k, n, 0j, 0j), cfg, form, KIND_COROLLARY)


def _scan_point(p: SpectralParams, cfg: ToleranceConfig) -> VerificationReport:
    try:
        kind = KIND_COROLLARY if p.is_origin else KIND_IDENTITY
        return verify_identity(p, cfg, kind=kind)
    except VerificationError as exc:
        logger.warning("⚠️  k=%d n=%d failed: %s", p.k, p.n, exc)
        return VerificationReport(p, error=exc.to_dict())
    except Exception as exc:  # noqa: BLE001 - float overflow, scipy argument checks
        logger.warning("⚠️  k=%d n=%d raised %s: %s", p.k, p.n, type(exc).__name__, exc)
        return VerificationReport(p, error={"type": type(exc).__name__, "message": str(exc)})


def scan(grid: Sequence[SpectralParams], cfg: ToleranceConfig) -> List[VerificationReport]:
    """Reports in input order; errors are captured per point"""
    grid = list(grid)
    if not grid:
        return []
    if cfg.workers > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            reports = list(pool.map(_scan_point, grid, repeat(cfg)))
    else:
        reports = [_scan_point(p, cfg) for p in grid]
    passed = sum(r.passed for r in reports)
    logger.info("ℹ️  Scan finished: %d/%d points pass", passed, len(reports))
    return reports


@dataclass
class ProbeResult:
    """Geometric side on a bi-circle around the origin"""
    center: complex
    mean: complex
    values: List[complex]
    max_deviation: float
    mean_deviation: float
    passed: bool

    def to_dict(self) -> dict:
        return {"center": _pair(self.center), "mean": _pair(self.mean),
                "values": [_pair(z) for z in self.values],
                "max_deviation": self.max_deviation, "mean_deviation": self.mean_deviation,
                "pass": self.passed}


def probe_removable_singularity(k: int, n: int, cfg: ToleranceConfig, r: float = PROBE_RADIUS,
                                points: int = PROBE_POINTS) -> ProbeResult:
    """Mean of the generic pathway on s1 = r e^(it), s2 = (r/sqrt 2) e^(i(t+1))

    The mean must reproduce the origin pathway; individual deviations are O(r).
    """
    ctx = _context(cfg, k)

    def total(s1, s2):
        p = SpectralParams(k, n, s1, s2).validate()
        return geometric_total(p, cfg.series_tol, ctx, cfg.series_cap,
                               cfg.contour_radius, cfg.contour_samples).total

    center = total(0j, 0j)
    values = []
    for j in range(points):
        theta = 2 * math.pi * j / points
        s1 = r * complex(math.cos(theta), math.sin(theta))
        s2 = r / math.sqrt(2) * complex(math.cos(theta + 1), math.sin(theta + 1))
        values.append(total(s1, s2))
    mean = complex(math.fsum(z.real for z in values) / points, math.fsum(z.imag for z in values) / points)
    scale = max(abs(center), 1.0)
    mean_deviation = abs(mean - center) / scale
    max_deviation = max(abs(z - center) for z in values) / scale
    passed = mean_deviation < PROBE_TOL
    logger.info("%s probe k=%d n=%d: mean deviation %.3e, max deviation %.3e",
                "✓" if passed else "✗", k, n, mean_deviation, max_deviation)
    return ProbeResult(center, mean, values, max_deviation, mean_deviation, passed)


# ----------------------------------------------------------------------------
# Report files
# ----------------------------------------------------------------------------

CSV_COLUMNS = ["k", "n", "s1_re", "s1_im", "s2_re", "s2_im", "kind", "spectral_re", "spectral_im",
               "m2_re", "m2_im", "e1_re", "e1_im", "e2_re", "e2_im", "e3_re", "e3_im",
               "geometric_re", "geometric_im", "abs_residual", "rel_residual", "pass", "error"]


def _csv_row(report: VerificationReport) -> list:
    p = report.params
    s1, s2 = complex(p.s1), complex(p.s2)
    row = [p.k, p.n, s1.real, s1.imag, s2.real, s2.imag, report.kind]
    spectral = complex(report.spectral) if report.spectral is not None else None
    row += [spectral.real, spectral.imag] if spectral is not None else ["", ""]
    g = report.geometric
    if g is not None:
        for z in (g.m2, g.e1, g.e2, g.e3, g.total):
            row += [complex(z).real, complex(z).imag]
    else:
        row += [""] * 10
    row += ["" if report.abs_residual is None else report.abs_residual,
            "" if report.rel_residual is None else report.rel_residual,
            int(report.passed),
            "" if report.error is None else f"{report.error['type']}: {report.error['message']}"]
    return row


def format_reports(reports: Sequence[VerificationReport], fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(_csv_row(r) for r in reports)
        return buffer.getvalue()
    raise ValueError(f"unknown report format '{fmt}'")


def write_reports(path, reports: Sequence[VerificationReport], fmt: str = "json") -> Path:
    path = Path(path).expanduser()
    path.write_text(format_reports(reports, fmt))
    logger.info("✓ %d report(s) written to %s", len(reports), path)
    return path
