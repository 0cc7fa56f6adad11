import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dabradar.numerology import (ALPHABET, MODE_I, SubcarrierGrid, active_indices,
                                 decode_transitions, encode_frame, map_active_to_fft_bin,
                                 nearest_transition, random_prs, random_transitions, slow_time,
                                 slow_time_grid)


def test_mode_i_constants():
    g = MODE_I
    assert (g.fft_size, g.cp_len, g.active_count) == (2048, 504, 1536)
    assert g.subcarrier_spacing * g.fft_size == g.sample_rate
    assert g.symbol_duration == pytest.approx(2552 / 2.048e6, rel=1e-12)
    assert g.frame_duration == pytest.approx(0.096, rel=1e-12)
    assert (76 * 2552 + 2656) == 196608


def test_grid_validation():
    with pytest.raises(ValueError):
        SubcarrierGrid(subcarrier_spacing=999.0)
    with pytest.raises(ValueError):
        SubcarrierGrid(active_count=1535)


def test_active_indices():
    k = active_indices()
    assert k.size == 1536
    assert 0 not in k and -768 in k and 768 in k
    assert k[0] == -768 and k[768] == 1
    assert np.all(np.diff(k) > 0)


@pytest.mark.parametrize("k, expected", [(1, 1), (-1, 2047), (-768, 1280), (768, 768)])
def test_map_active_to_fft_bin(k, expected):
    assert map_active_to_fft_bin(k) == expected


@pytest.mark.parametrize("k", [0, 769, -769])
def test_map_active_to_fft_bin_rejects(k):
    with pytest.raises(ValueError):
        map_active_to_fft_bin(k)


def test_alphabet_ratios():
    assert np.allclose(np.abs(ALPHABET), 1.0)
    ratios = {complex(np.round(a / b, 12)) for a in ALPHABET for b in ALPHABET}
    assert ratios == {1 + 0j, 1j, -1 + 0j, -1j}


def test_encode_prs_only():
    prs = random_prs(np.random.default_rng(0))
    grid = encode_frame(prs, np.zeros((1536, 0), dtype=np.int8))
    assert grid.symbols.shape == (1536, 1)
    assert np.array_equal(grid.symbols[:, 0], prs)


def test_encode_all_zero_transitions():
    prs = random_prs(np.random.default_rng(1))
    grid = encode_frame(prs, np.zeros((1536, 75), dtype=np.int8))
    m = np.arange(76)
    assert np.allclose(grid.symbols, prs[:, None] * np.exp(1j * m * np.pi / 4), atol=1e-12)


def test_encode_unit_modulus_and_recursion(rng):
    prs = random_prs(rng)
    q = random_transitions(rng)
    grid = encode_frame(prs, q)
    assert np.max(np.abs(np.abs(grid.symbols) - 1)) < 1e-12
    assert np.allclose(grid.symbols[:, 1:], grid.symbols[:, :-1] * ALPHABET[q], atol=1e-12)


def test_encode_rejects_bad_prs():
    with pytest.raises(ValueError):
        encode_frame(np.full(4, 0.5 + 0j), np.zeros((4, 3), dtype=np.int8))


def test_round_trip(rng):
    prs = random_prs(rng)
    q = random_transitions(rng)
    assert np.array_equal(decode_transitions(encode_frame(prs, q).symbols), q)


@pytest.mark.property
@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=40), st.integers(0, 7))
def test_round_trip_property(qs, start):
    prs = np.array([np.exp(1j * np.pi / 4 * (2 * start + 1))])
    q = np.array([qs], dtype=np.int8)
    assert np.array_equal(decode_transitions(encode_frame(prs, q).symbols), q)


def test_nearest_transition_phases():
    assert list(nearest_transition(ALPHABET * 1.7)) == [0, 1, 2, 3]


def test_prs_is_seeded():
    a = random_prs(np.random.default_rng(7))
    b = random_prs(np.random.default_rng(7))
    assert np.array_equal(a, b)
    assert np.allclose(np.abs(a), 1)


def test_slow_time_examples():
    assert slow_time(0, 0) == 0.0
    assert slow_time(1, 0) == pytest.approx(2552 / 2048000, rel=1e-12)
    assert slow_time(1, 0) == pytest.approx(1.24609e-3, rel=1e-5)
    assert slow_time(0, 1) == pytest.approx(0.096, rel=1e-12)


def test_slow_time_order_and_gap():
    t = slow_time_grid(3)
    flat = t.ravel()
    assert np.all(np.diff(flat) > 0)
    gap = t[1, 0] - t[0, -1]
    assert gap == pytest.approx(MODE_I.symbol_duration + MODE_I.null_len / MODE_I.sample_rate)
