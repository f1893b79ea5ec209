import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focalfreq.filters import MaskSpec, apply_filter, center_distance, default_spec, make_mask
from focalfreq.spectral import dft2, fftshift


def _centered_energy(img):
    return np.abs(fftshift(dft2(img)).values) ** 2


def test_bandstop_by_enumeration():
    mask = make_mask(MaskSpec("bandstop", inner=2, outer=4), 9, 9)
    for y in range(9):
        for x in range(9):
            d = np.hypot(y - 4, x - 4)
            assert mask[y, x] == (0.0 if 2 <= d <= 4 else 1.0)


def test_lowpass_and_highpass_boundaries():
    d = center_distance(8, 8)
    low = make_mask(MaskSpec("lowpass", radius=2), 8, 8)
    high = make_mask(MaskSpec("highpass", radius=2), 8, 8)
    np.testing.assert_array_equal(low, d <= 2)
    np.testing.assert_array_equal(high, d >= 2)
    assert make_mask(MaskSpec("lowpass", radius=1e9), 8, 8).min() == 1


def test_defaults():
    assert default_spec("lowpass", 64, 32).radius == 4
    spec = default_spec("bandstop", 64, 64)
    assert (spec.inner, spec.outer) == (8, 16)
    assert default_spec("notch", 5, 6).points == ((2, 3),)
    with pytest.raises(ValueError):
        default_spec("comb", 4, 4)


@pytest.mark.parametrize(
    "spec",
    [
        MaskSpec("lowpass", radius=-1),
        MaskSpec("highpass"),
        MaskSpec("bandstop", inner=4, outer=4),
        MaskSpec("bandstop", inner=5, outer=2),
        MaskSpec("notch", points=((9, 0),)),
        MaskSpec("comb"),
    ],
)
def test_invalid_masks(spec):
    with pytest.raises(ValueError):
        make_mask(spec, 8, 8)


def test_lowpass_removes_energy_outside_radius(rng):
    img = rng.uniform(0, 255, (32, 32, 3))
    mask = make_mask(MaskSpec("lowpass", radius=4), 32, 32)
    out = apply_filter(img, mask)
    energy = _centered_energy(out)
    outside = energy[center_distance(32, 32) > 4].sum()
    assert outside < 1e-9 * energy.sum()


def test_notch_dc_on_constant_is_zero():
    mask = make_mask(default_spec("notch", 16, 16), 16, 16)
    out = apply_filter(np.full((16, 16), 200.0), mask)
    assert np.max(np.abs(out)) < 1e-12


def test_bandstop_annulus_empty(rng):
    img = rng.uniform(0, 255, (33, 32))
    spec = MaskSpec("bandstop", inner=3, outer=7)
    out = apply_filter(img, make_mask(spec, 33, 32))
    energy = _centered_energy(out)[:, :, 0]
    d = center_distance(33, 32)
    ring = energy[(d >= 3) & (d <= 7)].sum()
    assert ring < 1e-9 * energy.sum()


def test_clip_only_when_requested(rng):
    img = rng.uniform(0, 255, (16, 16))
    mask = make_mask(MaskSpec("highpass", radius=2), 16, 16)
    raw = apply_filter(img, mask)
    assert raw.min() < 0
    clipped = apply_filter(img, mask, value_range=(0, 255))
    assert clipped.min() >= 0 and clipped.max() <= 255


def test_mask_shape_checked():
    with pytest.raises(ValueError, match="mask shape"):
        apply_filter(np.zeros((4, 4)), np.ones((4, 5)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["lowpass", "highpass", "bandstop"]), st.floats(0.5, 6))
def test_idempotent_and_linear(seed, kind, r):
    rng = np.random.default_rng(seed)
    spec = MaskSpec(kind, radius=r, inner=r, outer=r + 2)
    mask = make_mask(spec, 12, 10)
    a, b = rng.normal(size=(12, 10)), rng.normal(size=(12, 10))
    once = apply_filter(a, mask)
    np.testing.assert_allclose(apply_filter(once, mask), once, atol=1e-9)
    np.testing.assert_allclose(apply_filter(2 * a - b, mask), 2 * once - apply_filter(b, mask), atol=1e-9)
