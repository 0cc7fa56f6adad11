import numpy as np
import pytest

from dabradar.numerology import MODE_I, SPEED_OF_LIGHT
from dabradar.scene import (PathSpec, SceneConfig, adjacent_tone_bound, db_gain, fading_profile,
                            observe, random_scene, synthesize_csi, synthesize_frame)


def _scene(*paths, targets=()):
    return SceneConfig(paths=list(paths), targets=list(targets))


def test_single_direct_path_is_flat():
    h = synthesize_csi(_scene(PathSpec(1.0, 0.0)), 5, 2)
    assert np.allclose(h, 1.0)


def test_unit_delay_at_tone_512():
    h = synthesize_csi(_scene(PathSpec(1.0, 1.0)), 0, 0)
    k512 = np.searchsorted(np.arange(-768, 769)[np.arange(-768, 769) != 0], 512)
    assert h[k512] == pytest.approx(-1j, abs=1e-12)


def test_linearity_over_paths():
    a, b = PathSpec(0.7j, 3.5, 40.0), PathSpec(-0.2, 17.0)
    hab = synthesize_csi(_scene(a, b), 3, 1)
    assert np.allclose(hab, synthesize_csi(_scene(a), 3, 1) + synthesize_csi(_scene(b), 3, 1))


def test_frame_matches_per_symbol():
    sc = _scene(PathSpec(1.0, 0.0), targets=[PathSpec(0.1, 50.0, 123.0)])
    fr = synthesize_frame(sc, 1)
    for m in (0, 37, 75):
        assert np.allclose(fr[:, m], synthesize_csi(sc, m, 1))


def test_target_doppler_rotation():
    sc = _scene(PathSpec(1e-9, 0.0), targets=[PathSpec(1.0, 0.0, 100.0)])
    h0, h1 = synthesize_csi(sc, 0, 0), synthesize_csi(sc, 1, 0)
    ratio = (h1 / h0)[0]
    assert ratio == pytest.approx(np.exp(2j * np.pi * 100.0 * MODE_I.symbol_duration), abs=1e-7)


@pytest.mark.property
def test_static_scene_is_time_invariant():
    sc = _scene(PathSpec(1.0, 0.0), PathSpec(0.3 - 0.1j, 12.25))
    ref = synthesize_csi(sc, 0, 0)
    for m, f in [(1, 0), (75, 0), (0, 3), (40, 7)]:
        assert np.array_equal(synthesize_csi(sc, m, f), ref)


def test_scene_validation():
    with pytest.raises(ValueError):
        SceneConfig(paths=[])
    with pytest.raises(ValueError):
        _scene(PathSpec(1.0, 504.0))
    with pytest.raises(ValueError):
        SceneConfig(paths=[PathSpec(1.0, 0.0)], bistatic_scale=2.5)
    with pytest.raises(ValueError):
        SceneConfig(paths=[PathSpec(1.0, 0.0)], noise_var=-1.0)


def test_scene_round_trip():
    sc = SceneConfig([PathSpec(1.0, 0.0), PathSpec(0.2j, 8.0)], [PathSpec(0.05, 90.0, 160.0)],
                     noise_var=0.1, fading_depth_db=20.0, frames=2)
    back = SceneConfig.from_dict(sc.to_dict())
    assert back == sc


def test_velocity_doppler_conversion():
    sc = _scene(PathSpec(1.0, 0.0))
    nu = sc.doppler_from_velocity(120.0)
    assert nu == pytest.approx(2 * 120.0 * 202.928e6 / SPEED_OF_LIGHT)
    assert sc.velocity_from_doppler(nu) == pytest.approx(120.0)


def test_observe_noiseless(rng):
    h = rng.standard_normal(10) + 1j * rng.standard_normal(10)
    x = np.exp(1j * rng.uniform(0, 2 * np.pi, 10))
    assert np.array_equal(observe(h, x, 0.0, rng), h * x)


def test_observe_noise_variance(rng):
    n = 100_000
    y = observe(np.ones(n), np.ones(n), 0.1, rng)
    e = np.abs(y - 1) ** 2
    assert abs(e.mean() - 0.1) < 3 * e.std() / np.sqrt(n)
    assert abs(np.mean((y - 1).real ** 2) - 0.05) < 0.002


def test_observe_power(rng):
    n = 100_000
    h = 0.6 - 0.8j
    p = np.abs(observe(np.full(n, h), np.exp(1j * rng.uniform(0, 6.3, n)), 0.25, rng)) ** 2
    assert abs(p.mean() - (1.0 + 0.25)) < 3 * p.std() / np.sqrt(n)


def test_observe_rejects_negative_variance(rng):
    with pytest.raises(ValueError):
        observe(np.ones(2), np.ones(2), -0.1, rng)


def test_fading_zero_depth():
    assert np.array_equal(fading_profile(0.0, np.random.default_rng(0)), np.ones(1536))


@pytest.mark.parametrize("depth", [3.0, 20.0, 40.0])
def test_fading_depth(depth):
    for seed in range(5):
        a = np.abs(fading_profile(depth, np.random.default_rng(seed)))
        assert abs(20 * np.log10(a.max() / a.min()) - depth) < 0.5


def test_fading_is_seeded_and_smooth():
    a = fading_profile(20.0, np.random.default_rng(3))
    assert np.array_equal(a, fading_profile(20.0, np.random.default_rng(3)))
    # short-delay construction: adjacent tones stay close
    assert np.max(np.abs(np.diff(a))) < 0.2 * np.max(np.abs(a))


def test_fading_rejects_negative():
    with pytest.raises(ValueError):
        fading_profile(-1.0, np.random.default_rng(0))


def test_random_scene_ranges():
    rng = np.random.default_rng(2)
    base = SceneConfig([PathSpec(2.0, 0.0), PathSpec(0.5, 9.0)])
    ref_db = 20 * np.log10(2.0)
    for _ in range(10_000):
        sc = random_scene(rng, base)
        (t,) = sc.targets
        assert 55 <= t.delay_bins <= 220 and t.delay_bins == int(t.delay_bins)
        amp = 20 * np.log10(abs(t.gain)) - ref_db
        assert -35 - 1e-9 <= amp <= -21 + 1e-9
        v = abs(sc.velocity_from_doppler(t.doppler_hz))
        assert 50 - 1e-9 <= v <= 240 + 1e-9


@pytest.mark.property
def test_adjacent_tone_bound(rng):
    for _ in range(20):
        paths = [PathSpec(complex(*rng.standard_normal(2)), rng.uniform(0, 100)) for _ in range(4)]
        h = synthesize_csi(_scene(*paths), 0, 0)
        steps = np.abs(np.diff(h))
        steps = np.delete(steps, 767)  # the DC gap is two bins wide
        assert steps.max() <= adjacent_tone_bound(paths) + 1e-12


def test_db_gain():
    assert db_gain(-20.0) == pytest.approx(0.1)
    assert db_gain(0.0, np.pi) == pytest.approx(-1.0)
