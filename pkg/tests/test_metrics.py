import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dabradar import metrics
from dabradar.metrics import RegionSpec
from dabradar.numerology import encode_frame, random_prs, random_transitions


def _grid(rng):
    return encode_frame(random_prs(rng), random_transitions(rng)).symbols


def test_ser_identical(rng):
    x = _grid(rng)
    assert metrics.symbol_error_rate(x, x) == 0.0


def test_ser_all_wrong(rng):
    x = _grid(rng)
    assert metrics.symbol_error_rate(x * 1j, x) == 1.0


def test_ser_single_error(rng):
    x = _grid(rng)
    est = x.copy()
    est[10, 40] *= -1
    assert metrics.symbol_error_rate(est, x) == pytest.approx(1 / (1536 * 75))


def test_ser_ignores_prs_and_snaps(rng):
    x = _grid(rng)
    est = x * np.exp(1j * 1e-6)
    est[:, 0] = 1.0
    assert metrics.symbol_error_rate(est, x) == 0.0
    with pytest.raises(ValueError):
        metrics.symbol_error_rate(x[:, :5], x)


def test_nmse_examples(rng):
    h = rng.standard_normal((8, 4)) + 1j * rng.standard_normal((8, 4))
    assert metrics.nmse_db(h, h) == metrics.DB_FLOOR
    assert metrics.nmse_db(np.zeros_like(h), h) == pytest.approx(0.0, abs=1e-12)
    assert metrics.nmse_db(2 * h, h) == pytest.approx(0.0, abs=1e-12)
    assert metrics.nmse_db(1.1 * h, h) == pytest.approx(-20.0)
    with pytest.raises(ValueError):
        metrics.nmse_db(h, np.zeros_like(h))


def test_nmse_joint_scaling(rng):
    h = rng.standard_normal(50) + 0j
    e = h + 0.1 * rng.standard_normal(50)
    assert metrics.nmse_db(3 * e, 3 * h) == pytest.approx(metrics.nmse_db(e, h))


REGION = RegionSpec((40, 30), 20)


def test_tbr_single_pixel():
    p = np.ones((100, 60))
    p[40, 30] = 100.0
    assert metrics.tbr_db(p, REGION) == pytest.approx(20.0)


def test_tbr_uniform():
    assert metrics.tbr_db(np.full((100, 60), 3.0), REGION) == pytest.approx(0.0)


def test_tbr_ignores_dc_and_mainlobe():
    p = np.ones((100, 60))
    p[40, 30] = 100.0
    p[:, 19:22] = 1e6  # zero-Doppler clutter inside the DC guard
    p[41, 31] = 50.0  # mainlobe shoulder
    assert metrics.tbr_db(p, REGION) == pytest.approx(20.0)


def test_tbr_empty_background():
    with pytest.raises(ValueError):
        metrics.tbr_db(np.ones((5, 5)), RegionSpec((2, 2), 2, 2, 2, 2, 2))


def test_region_validation():
    with pytest.raises(ValueError):
        RegionSpec((0, 0), 0, guard_range=5, window_range=4)


def test_focus_delta_map_caps():
    p = np.zeros((100, 60))
    p[40, 30] = 1.0
    assert metrics.range_focus_db(p, REGION) == metrics.DB_CAP
    assert metrics.doppler_focus_db(p, REGION) == metrics.DB_CAP


def test_focus_uniform():
    p = np.ones((100, 60))
    assert metrics.range_focus_db(p, REGION) == pytest.approx(0.0)
    assert metrics.doppler_focus_db(p, REGION) == pytest.approx(0.0)


def test_focus_peak_ten_sidelobes_one():
    amp = np.ones((100, 60))
    amp[40, 30] = 10.0
    p = amp ** 2
    assert metrics.range_focus_db(p, REGION) == pytest.approx(20.0)
    assert metrics.doppler_focus_db(p, REGION) == pytest.approx(20.0)


def test_doppler_focus_excludes_dc():
    amp = np.ones((100, 60))
    amp[40, 30] = 10.0
    amp[:, 20] = 1e3
    assert metrics.doppler_focus_db(amp ** 2, REGION) == pytest.approx(20.0)


@pytest.mark.property
@settings(max_examples=30, deadline=None)
@given(st.floats(1e-6, 1e6))
def test_map_metrics_scale_invariant(c):
    rng = np.random.default_rng(1)
    p = rng.exponential(1.0, (100, 60))
    p[40, 30] = 80.0
    for f in (metrics.tbr_db, metrics.range_focus_db, metrics.doppler_focus_db):
        assert f(c * p, REGION) == pytest.approx(f(p, REGION), abs=1e-9)


def test_average_gains():
    assert metrics.average_gains(np.zeros((4, 5)), np.ones((4, 5))) == (0.0, 1.0)
    k = np.concatenate([np.full(10, 0.25), np.full(10, 0.75)])
    assert metrics.average_gains(k, k)[0] == pytest.approx(0.5)
