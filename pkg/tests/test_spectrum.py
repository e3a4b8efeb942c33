import math
from dataclasses import replace

import numpy as np
import pytest

from nrpnoise.params import SweepSpec, preset_fig2
from nrpnoise.quadrature import QuadratureExpr, assemble_covariance
from nrpnoise.schemes import SchemeId
from nrpnoise.spectrum import (
    NoiseSpectrum,
    closed_form_suppression,
    export_csv,
    monte_carlo_psd,
    read_csv,
    rel_sql_point,
    sql_touch_frequency,
    suppression_report,
    sweep,
)

# mpmath references
TOUCH_HZ = 62.753243599644054706
DB_R17 = (11.760546800376258, 58.802734001881290, 47.042187201505032, 6.0012731988542689)


def small(cfg, n=60):
    return replace(cfg, sweep=SweepSpec(1.0, 1000.0, n, "log"))


def test_monte_carlo_vacuum_channel():
    expr = QuadratureExpr.from_terms(1.0, {"vYout_a": 1.0})
    cov = assemble_covariance(preset_fig2(), 1.0)
    est = monte_carlo_psd(expr, cov, 200_000, seed=3)
    assert est.agrees_with(0.5)
    assert est.stderr == pytest.approx(0.5 / math.sqrt(200_000), rel=0.05)


def test_monte_carlo_is_deterministic():
    expr = QuadratureExpr.from_terms(1.0, {"Yin_a": 1.0, "Yin_b": 0.9})
    cov = assemble_covariance(preset_fig2(), 1.0)
    assert monte_carlo_psd(expr, cov, 10_000, seed=5) == monte_carlo_psd(expr, cov, 10_000, seed=5)
    assert monte_carlo_psd(expr, cov, 10_000, seed=5) != monte_carlo_psd(expr, cov, 10_000, seed=6)


def test_sql_touch_frequency(fig2):
    assert sql_touch_frequency(fig2) == pytest.approx(TOUCH_HZ, rel=1e-12)


def test_zero_squeezing_dual_matches_single_vacuum(fig2):
    cfg = fig2.with_squeezing(0.0)
    for f in np.geomspace(1, 1000, 40):
        w = 2 * math.pi * f
        dual = rel_sql_point(SchemeId.DualLossless, cfg, w)
        single = rel_sql_point(SchemeId.SingleVacuum, cfg, w)
        assert dual == pytest.approx(single, rel=1e-10)


def test_single_squeezed_tangent_is_unchanged_at_sql_point(fig2):
    w = 2 * math.pi * TOUCH_HZ
    assert rel_sql_point(SchemeId.SingleSqueezed, fig2, w) == pytest.approx(math.cosh(2 * fig2.r), rel=1e-9)


def test_sweep_order_and_workers(fig2):
    cfg = small(fig2)
    order = [SchemeId.DualLossy, SchemeId.SingleVacuum, SchemeId.HybridIdeal]
    serial = sweep(cfg, order)
    threaded = sweep(cfg, order, workers=4)
    assert [s.scheme for s in serial] == order
    for a, b in zip(serial, threaded):
        assert np.array_equal(a.psd_rel_sql, b.psd_rel_sql)
    with pytest.raises(ValueError):
        sweep(cfg, [])


def test_db_column_consistent(fig2):
    s = sweep(small(fig2), [SchemeId.DualLossy])[0]
    assert np.allclose(10 ** (s.psd_db / 10), s.psd_rel_sql, rtol=1e-13)
    assert np.array_equal(s.below_sql(), s.psd_db < 0)


def test_csv_roundtrip(tmp_path, fig2):
    spectra = sweep(small(fig2, 25), [SchemeId.SingleVacuum, SchemeId.DualLossy])
    path = tmp_path / "out.csv"
    export_csv(spectra, path)
    text = path.read_text()
    assert "\r" not in text
    assert text.splitlines()[0] == "freq_hz,single-vacuum_rel_sql,single-vacuum_db,dual-lossy_rel_sql,dual-lossy_db"
    freqs, cols = read_csv(path)
    assert len(freqs) == 25
    assert np.array_equal(freqs, spectra[0].freqs_hz)
    assert np.array_equal(cols["dual-lossy_rel_sql"], spectra[1].psd_rel_sql)


def test_csv_rejects_mismatched_grids(tmp_path):
    a = NoiseSpectrum(SchemeId.SingleVacuum, np.array([1.0, 2.0]), np.array([1.0, 1.0]))
    b = NoiseSpectrum(SchemeId.DualLossy, np.array([1.0, 3.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        export_csv([a, b], tmp_path / "x.csv")


def test_closed_form_suppression_db():
    db = [10 * math.log10(v) for v in closed_form_suppression(1.7)]
    assert db == pytest.approx(list(DB_R17), rel=1e-13)


def test_suppression_report_lossless_matches_closed_form(fig2):
    rep = suppression_report(fig2.lossless())
    assert not rep.lossy
    assert rep.closed_form_residual < 1e-10
    assert [rep.shot_db, rep.qba_db, rep.thermal_db, rep.signal_gain_db] == pytest.approx(list(DB_R17), rel=1e-10)


def test_suppression_report_lossy(fig2):
    rep = suppression_report(fig2)
    assert rep.lossy and rep.closed_form_residual is None
    assert rep.qba_db < DB_R17[1]
    assert rep.shot_db < DB_R17[0]
