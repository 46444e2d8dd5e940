from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from htquant.errors import BitsOutOfRange, CodeOverflow
from htquant.quantize import (
    BIPOLAR,
    UNIPOLAR,
    baseline_quantize,
    bpp,
    cell_grid,
    dequantize_channel,
    dequantize_planes,
    quantize_channel,
    quantize_planes,
    reconstruction_error_bound,
)
from htquant.transform import forward_rows, inverse_rows


def nearest_cell(values, bits, rng):
    """Exhaustive search: index of the closest reconstruction level."""
    lo, hi = cell_grid(bits, rng)
    n = 1 << bits
    levels = lo + (np.arange(n) + 0.5) * (hi - lo) / n
    return np.argmin(np.abs(values[:, None] - levels[None, :]), axis=1)


def test_small_examples():
    assert quantize_channel([0.7], 1).tolist() == [1]
    assert quantize_channel([0.3], 1).tolist() == [0]
    assert quantize_channel([-1.0, 1.0], 3, BIPOLAR).tolist() == [0, 7]
    assert dequantize_channel([1], 1).tolist() == [0.75]


def test_bipolar_zero_is_a_level():
    for n in range(1, 17):
        assert dequantize_channel([1 << (n - 1)], n, BIPOLAR)[0] == 0.0
        assert dequantize_channel([0], n, BIPOLAR)[0] == -1.0
        assert quantize_channel([0.0], n, BIPOLAR)[0] == 1 << (n - 1)


def test_eliminated_channel():
    assert quantize_channel([0.3, 0.5], 0, BIPOLAR).size == 0
    assert dequantize_channel(None, 0, BIPOLAR, shape=(2, 3)).tolist() == [[0.0] * 3] * 2


@pytest.mark.parametrize("bits", range(1, 9))
@pytest.mark.parametrize("rng_name", [UNIPOLAR, BIPOLAR])
def test_matches_nearest_cell_oracle(bits, rng_name):
    lo, hi = cell_grid(bits, rng_name)
    v = np.random.default_rng(bits).uniform(lo, hi, 10_000)
    assert np.array_equal(quantize_channel(v, bits, rng_name), nearest_cell(v, bits, rng_name))


def test_baseline_matches_lsb_drop():
    ramp = np.arange(256)
    for n in range(1, 9):
        codes = quantize_channel(ramp / 255.0, n)
        assert np.array_equal(codes, ramp >> (8 - n)), n
    assert np.array_equal(baseline_quantize(ramp / 255.0, 3) * 16 - 1, ((ramp >> 5) * 2) * 1.0)


def test_baseline_eight_bits_close():
    ramp = np.arange(256) / 255.0
    assert np.max(np.abs(baseline_quantize(ramp, 8) - ramp)) <= 2.0**-9


def test_errors():
    with pytest.raises(BitsOutOfRange):
        quantize_channel([0.1], 17)
    with pytest.raises(BitsOutOfRange):
        baseline_quantize(np.zeros(3), 0)
    with pytest.raises(CodeOverflow):
        dequantize_channel([8], 3)


def test_dtypes():
    assert quantize_channel([0.5], 8).dtype == np.uint8
    assert quantize_channel([0.5], 12).dtype == np.uint16


@settings(max_examples=60, deadline=None)
@given(bits=st.integers(1, 16), seed=st.integers(0, 2**31))
def test_roundtrip_bounds(bits, seed):
    r = np.random.default_rng(seed)
    u = r.uniform(0, 1, 200)
    assert np.all(np.abs(u - dequantize_channel(quantize_channel(u, bits), bits)) <= 2.0 ** -(bits + 1) + 1e-15)
    lo, hi = cell_grid(bits, BIPOLAR)
    b = r.uniform(lo, hi, 200)
    err = np.abs(b - dequantize_channel(quantize_channel(b, bits, BIPOLAR), bits, BIPOLAR))
    assert np.all(err <= 2.0**-bits + 1e-15)
    # the top sliver (1 - 2**-N, 1] of the declared range saturates into the last cell
    full = r.uniform(-1, 1, 200)
    err = np.abs(full - dequantize_channel(quantize_channel(full, bits, BIPOLAR), bits, BIPOLAR))
    assert np.all(err <= 2.0 ** (1 - bits) + 1e-15)


@settings(max_examples=40, deadline=None)
@given(bits=st.integers(1, 15), seed=st.integers(0, 2**31))
def test_precision_nests(bits, seed):
    """Dropping the LSB of an (N+1)-bit unipolar code gives the N-bit code."""
    u = np.random.default_rng(seed).uniform(0, 1, 100)
    assert np.array_equal(quantize_channel(u, bits + 1) >> 1, quantize_channel(u, bits))


def test_bpp():
    assert bpp((8, 5, 6, 5)) == 6
    assert bpp((8, 0, 6, 0)) == Fraction(7, 2)
    assert bpp((7, 0, 5, 0)) == 3
    assert bpp((5, 2, 3, 2)) == 3
    assert bpp((3, 3, 3, 3)) == 3


def test_planes_roundtrip_within_bound(rng):
    img = rng.random((16, 32))
    for bits, alphas in [((8, 8, 8, 8), (0, 0, 0, 0)), ((6, 6, 6, 6), (0, 0, 0, 0)), ((10, 7, 8, 7), (0, 3, 2, 3))]:
        ch = forward_rows(img, 4, alphas)
        # unit-gain channels always sit inside the grid minus its top sliver; check bound only when nothing clips
        cc = quantize_planes(ch, bits)
        rec = inverse_rows(dequantize_planes(cc, ch.gains))
        lo_ok = all(np.all(np.abs(ch.planes[j]) <= 1 - 2.0**-bits[j]) for j in range(1, 4))
        if lo_ok:
            assert np.max(np.abs(rec - img)) <= reconstruction_error_bound(bits, ch.gains) + 1e-12


def test_quantize_planes_elimination(rng):
    ch = forward_rows(rng.random((4, 8)), 4, (0, 3, 2, 3))
    cc = quantize_planes(ch, (8, 0, 6, 0))
    assert cc.codes[1] is None and cc.codes[3] is None
    assert cc.bpp == Fraction(7, 2)
    deq = dequantize_planes(cc, ch.gains)
    assert np.all(deq.planes[1] == 0) and np.all(deq.planes[3] == 0)
