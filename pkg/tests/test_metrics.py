import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focalfreq.metrics import (
    MetricReport,
    evaluate_pair,
    gaussian_window,
    lfd,
    lfd_per_channel,
    mean_report,
    psnr,
    psnr_per_channel,
    ssim,
)
from oracles import brute_ssim, dense_dft2


def test_psnr_closed_form(rng):
    real = rng.uniform(20, 230, (16, 16, 3))
    # |error| fixed at 16 everywhere: PSNR = 20 log10(255 / 16)
    fake = real + np.where(rng.random(real.shape) < 0.5, -16.0, 16.0)
    assert psnr(real, fake) == pytest.approx(20 * math.log10(255 / 16), abs=1e-9)
    assert psnr(real, fake) == pytest.approx(24.05, abs=5e-3)
    assert psnr(real, real) == math.inf
    assert psnr_per_channel(real, real) == [math.inf] * 3


def test_ssim_identity_and_oracle(rng):
    a = rng.uniform(0, 255, (20, 18))
    b = np.clip(a + rng.normal(0, 20, a.shape), 0, 255)
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-12)
    assert ssim(a, b) == pytest.approx(brute_ssim(a, b), abs=1e-9)


def test_ssim_negative_and_offset(rng):
    a = rng.uniform(0, 255, (32, 32))
    assert ssim(a, 255 - a) < 0.1
    c = np.full((32, 32), 100.0)
    assert ssim(c, c + 1) >= 0.99


def test_ssim_window():
    g = gaussian_window()
    assert len(g) == 11 and g.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError, match="at least 11"):
        ssim(np.zeros((10, 20)), np.zeros((10, 20)))


def test_lfd_identity(rng):
    for _ in range(10):
        h, w = rng.integers(1, 12, size=2)
        a, b = rng.uniform(0, 255, (h, w)), rng.uniform(0, 255, (h, w))
        diff = dense_dft2(a) - dense_dft2(b)
        assert lfd(a, b) == pytest.approx(math.log(np.mean(np.abs(diff) ** 2) + 1), rel=1e-9)
        mse = np.mean((a - b) ** 2)
        assert abs(lfd(a, b) - math.log(h * w * mse + 1)) < 1e-6
    assert lfd(a, a) == 0.0


def test_lfd_channel_mean(rng):
    a, b = rng.uniform(0, 255, (8, 8, 3)), rng.uniform(0, 255, (8, 8, 3))
    per = lfd_per_channel(a, b)
    assert lfd(a, b) == pytest.approx(per.mean())
    assert per[1] == pytest.approx(lfd(a[:, :, 1], b[:, :, 1]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1.01, 4))
def test_lfd_monotone_in_error_scale(seed, t):
    rng = np.random.default_rng(seed)
    a, d = rng.uniform(0, 255, (6, 6)), rng.normal(0, 5, (6, 6))
    assert lfd(a, a + t * d) > lfd(a, a + d)
    assert lfd(a, a + d) == pytest.approx(lfd(a + d, a))


def test_shape_mismatch():
    with pytest.raises(ValueError, match="shape"):
        psnr(np.zeros((4, 4)), np.zeros((4, 5)))


def test_reports(rng):
    a, b = rng.uniform(0, 255, (16, 16, 3)), rng.uniform(0, 255, (16, 16, 3))
    rep = evaluate_pair(a, b)
    assert rep.lfd == pytest.approx(lfd(a, b))
    assert len(rep.per_channel["ssim"]) == 3
    same = evaluate_pair(a, a).to_dict()
    assert same["psnr"] == "inf" and same["per_channel"]["psnr"] == ["inf"] * 3
    small = evaluate_pair(np.zeros((4, 4)), np.ones((4, 4)))
    assert math.isnan(small.ssim)
    m = mean_report([rep, evaluate_pair(a, 0.5 * a + 0.5 * b)])
    assert isinstance(m, MetricReport)
    assert m.lfd == pytest.approx((rep.lfd + lfd(a, 0.5 * a + 0.5 * b)) / 2)
    with pytest.raises(ValueError):
        mean_report([])
