import csv
import json

import pytest

import verify
from geometric import SpectralParams
from modforms import SUPPORTED_WEIGHTS
from verify import (format_reports, probe_removable_singularity, scan, spectral_total, verify_corollary,
                    verify_identity, write_reports)

S1 = 0.07 + 0.11j
S2 = -0.13 + 0.05j
SECOND_POINT = (0.31, 0.11 - 0.17j)


def test_spectral_side_at_n_equals_one_and_two(cfg, delta):
    one = spectral_total(SpectralParams(12, 1), cfg, delta)
    two = spectral_total(SpectralParams(12, 2), cfg, delta)
    assert one.real > 0
    assert abs(two / one - (-24 / 2 ** 5.5)) < 1e-13


def test_spectral_side_vanishes_at_odd_sign(cfg, forms):
    for n in (1, 2, 5):
        assert abs(spectral_total(SpectralParams(18, n), cfg, forms[18])) < 1e-10


def test_identity_at_reference_point(cfg, delta):
    report = verify_identity(SpectralParams(12, 1, S1, S2), cfg, delta)
    assert report.passed
    assert report.rel_residual < 1e-8
    assert report.geometric.pathway == "generic"
    assert report.provenance["precision"] == "double"


def test_identity_region_error(cfg, delta):
    from errors import RegionError

    with pytest.raises(RegionError):
        verify_identity(SpectralParams(12, 1, 0.3, 0.3), cfg, delta)


@pytest.mark.parametrize("k,n", [(12, 1), (16, 4), (26, 2), (22, 3), (12, 5), (12, 10), (16, 9), (18, 6)])
def test_corollary_points(cfg, forms, k, n):
    report = verify_corollary(k, n, cfg, forms[k])
    assert report.passed
    assert report.kind == "corollary"
    if (k // 2) % 2:
        assert abs(report.spectral) < 1e-8
        assert abs(report.geometric.total) < 1e-8


def test_removable_singularity_circle_mean(cfg):
    result = probe_removable_singularity(12, 2, cfg)
    assert result.passed
    assert result.mean_deviation < 1e-5
    assert len(result.values) == 8


def test_scan_empty(cfg):
    assert scan([], cfg) == []


def test_scan_isolates_errors(cfg):
    grid = [SpectralParams(12, 1, S1, S2), SpectralParams(12, 1, 0.3, 0.3), SpectralParams(12, 2, S1, S2)]
    reports = scan(grid, cfg)
    assert [r.params for r in reports] == grid
    assert reports[1].error["type"] == "RegionError"
    assert not reports[1].passed
    assert reports[0].passed and reports[2].passed
    alone = verify_identity(grid[2], cfg)
    assert alone.fingerprint() == reports[2].fingerprint()


def test_scan_isolates_arithmetic_failures(cfg, monkeypatch):
    real = verify.verify_identity

    def overflowing(p, config, *args, **kwargs):
        if p.n == 2:
            raise OverflowError("(34, 'Numerical result out of range')")
        return real(p, config, *args, **kwargs)

    monkeypatch.setattr(verify, "verify_identity", overflowing)
    grid = [SpectralParams(12, n, S1, S2) for n in (1, 2, 3)]
    reports = scan(grid, cfg)
    assert reports[1].error == {"type": "OverflowError", "message": "(34, 'Numerical result out of range')"}
    assert not reports[1].passed
    assert reports[0].passed and reports[2].passed


def test_large_weights_record_extended_backend(cfg, forms):
    report = verify_identity(SpectralParams(26, 3, S1, S2), cfg, forms[26])
    assert report.provenance["precision"] == "double-double"
    assert report.passed


def test_scan_determinism_and_workers(cfg):
    grid = [SpectralParams(k, 2, S1, S2) for k in (12, 16)] + [SpectralParams(18, 3)]
    first = [r.fingerprint() for r in scan(grid, cfg)]
    second = [r.fingerprint() for r in scan(grid, cfg)]
    parallel = [r.fingerprint() for r in scan(grid, cfg.replace(workers=2))]
    assert first == second == parallel


def test_report_schema_and_files(cfg, delta, tmp_path):
    report = verify_identity(SpectralParams(12, 1, S1, S2), cfg, delta)
    data = json.loads(format_reports([report]))[0]
    assert set(data) >= {"params", "spectral", "geometric", "residuals", "pass", "timings", "provenance"}
    assert set(data["geometric"]) >= {"m2", "e", "total"}
    assert len(data["geometric"]["m2"]) == 4 and len(data["geometric"]["e"]) == 3
    assert data["params"]["s1"] == {"re": S1.real, "im": S1.imag}

    path = write_reports(tmp_path / "reports.csv", [report], "csv")
    rows = list(csv.DictReader(path.open()))
    assert rows[0]["k"] == "12" and rows[0]["pass"] == "1"
    assert float(rows[0]["spectral_re"]) == report.spectral.real

    path = write_reports(tmp_path / "reports.json", [report])
    assert json.loads(path.read_text())[0]["pass"] is True


def test_fingerprint_ignores_timings(cfg, delta):
    report = verify_identity(SpectralParams(12, 3, S1, S2), cfg, delta)
    before = report.fingerprint()
    report.timings["spectral"] += 1.0
    assert report.fingerprint() == before


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(SUPPORTED_WEIGHTS))
def test_identity_grid(cfg, forms, k):
    for n in range(1, 11):
        for s1, s2 in ((S1, S2), SECOND_POINT):
            report = verify_identity(SpectralParams(k, n, s1, s2), cfg, forms[k])
            assert report.passed, report.to_dict()


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(SUPPORTED_WEIGHTS))
def test_corollary_grid(cfg, forms, k):
    for n in range(1, 11):
        report = verify_corollary(k, n, cfg, forms[k])
        assert report.passed, report.to_dict()
        if (k // 2) % 2:
            assert abs(report.geometric.total) < 1e-8


def _residual(report):
    return report.abs_residual if abs(report.spectral) < 1e-10 else report.rel_residual


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(SUPPORTED_WEIGHTS))
def test_double_double_does_not_degrade(cfg, forms, k):
    low_cfg = cfg.replace(extended_from_weight=0)
    high_cfg = cfg.replace(precision="double-double")
    points = [(S1, S2), SECOND_POINT, (0j, 0j)]
    for n in range(1, 11):
        for s1, s2 in points:
            p = SpectralParams(k, n, s1, s2)
            low = verify_identity(p, low_cfg, forms[k])
            high = verify_identity(p, high_cfg, forms[k])
            assert high.provenance["precision"] == "double-double"
            assert _residual(high) <= _residual(low) + 1e-12
