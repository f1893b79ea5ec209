"""Focal frequency loss: value and analytic gradient.

The loss compares real and fake images coordinate by coordinate in an
orthonormal spectral basis and scales each squared difference by a weight
``|F_r - F_f| ** alpha`` normalized to ``[0, 1]``. The weight is recomputed on
every call and treated as a constant when differentiating, so
:func:`ffl_backward` returns the gradient with the weights frozen at their
forward values.

Batched evaluation works on ``(B, H, W, C)`` stacks. Patching splits every
image into ``p x p`` equal crops; weights are normalized per image, per patch
and per channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .spectral import Spectrum, as_image, dct2_raw, fft2_raw


class Transform(str, Enum):
    DFT = "dft"
    DCT = "dct"


class Distance(str, Enum):
    FULL = "full"
    AMPLITUDE = "amplitude_only"
    PHASE = "phase_only"
    SPATIAL = "spatial"

    @classmethod
    def _missing_(cls, value):
        aliases = {"amplitude": cls.AMPLITUDE, "phase": cls.PHASE, "freq": cls.FULL}
        return aliases.get(value)


class BatchReduction(str, Enum):
    MEAN_PER_IMAGE = "mean_per_image"
    AVERAGE_SPECTRUM = "average_spectrum"


@dataclass(frozen=True)
class LossConfig:
    """Selects the loss variant.

    ``focal=False`` fixes every weight to 1 (plain frequency distance) and
    ``distance="spatial"`` skips the transform entirely, weighting pixels
    instead of frequencies.
    """

    alpha: float = 1.0
    patch_factor: int = 1
    transform: Transform = Transform.DFT
    distance: Distance = Distance.FULL
    focal: bool = True
    batch_reduction: BatchReduction = BatchReduction.MEAN_PER_IMAGE
    epsilon: float = 1e-8

    def __post_init__(self):
        object.__setattr__(self, "transform", Transform(self.transform))
        object.__setattr__(self, "distance", Distance(self.distance))
        object.__setattr__(self, "batch_reduction", BatchReduction(self.batch_reduction))
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError(f"alpha must be a finite non-negative number, got {self.alpha}")
        if isinstance(self.patch_factor, bool) or int(self.patch_factor) != self.patch_factor or self.patch_factor < 1:
            raise ValueError(f"patch_factor must be a positive integer, got {self.patch_factor}")
        object.__setattr__(self, "patch_factor", int(self.patch_factor))
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


DEFAULT_CONFIG = LossConfig()


def _spectrum_pair(f_real, f_fake):
    if isinstance(f_real, Spectrum) and isinstance(f_fake, Spectrum):
        if f_real.orthonormalized != f_fake.orthonormalized:
            raise ValueError("spectra differ in orthonormalization")
    a = f_real.values if isinstance(f_real, Spectrum) else np.asarray(f_real, dtype=np.complex128)
    b = f_fake.values if isinstance(f_fake, Spectrum) else np.asarray(f_fake, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def freq_distance_map(f_real, f_fake) -> np.ndarray:
    """Squared modulus of the coordinate-wise spectrum difference."""
    a, b = _spectrum_pair(f_real, f_fake)
    d = a - b
    return d.real**2 + d.imag**2


def freq_distance(f_real, f_fake) -> float:
    """Mean of :func:`freq_distance_map` over coordinates and channels."""
    return float(np.mean(freq_distance_map(f_real, f_fake)))


def _normalized_weights(magnitude, alpha, axes):
    peak = magnitude.max(axis=axes, keepdims=True)
    raw = magnitude**alpha
    raw_peak = raw.max(axis=axes, keepdims=True)
    # identical slices get zero weight instead of 0/0
    safe = np.where(peak > 0, raw_peak, 1.0)
    return np.where(peak > 0, raw / safe, 0.0)


def weight_matrix(f_real, f_fake, alpha: float = 1.0) -> np.ndarray:
    """Spectrum weights ``|F_r - F_f| ** alpha`` divided by the per-channel max."""
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    a, b = _spectrum_pair(f_real, f_fake)
    return _normalized_weights(np.abs(a - b), alpha, axes=(0, 1))


def _patchify(x, p):
    b, h, w, c = x.shape
    return x.reshape(b, p, h // p, p, w // p, c).transpose(0, 1, 3, 2, 4, 5).reshape(b, p * p, h // p, w // p, c)


def _unpatchify(x, p):
    b, _, ph, pw, c = x.shape
    return x.reshape(b, p, p, ph, pw, c).transpose(0, 1, 3, 2, 4, 5).reshape(b, p * ph, p * pw, c)


def _forward_transform(x, transform):
    # x: (B, P, h, w, C) real
    if transform is Transform.DFT:
        return fft2_raw(x, axes=(2, 3)) / np.sqrt(x.shape[2] * x.shape[3])
    return dct2_raw(x, axes=(2, 3)).astype(np.complex128)


def _adjoint_transform(g, transform):
    if transform is Transform.DFT:
        return fft2_raw(g, inverse=True, axes=(2, 3)).real / np.sqrt(g.shape[2] * g.shape[3])
    return dct2_raw(g.real, inverse=True, axes=(2, 3))


def _distance_terms(rep_real, rep_fake, distance, eps):
    """Per-coordinate distance and its gradient w.r.t. the fake representation.

    The gradient is packed as ``d/d(real part) + 1j * d/d(imag part)``.
    """
    if distance in (Distance.FULL, Distance.SPATIAL):
        diff = rep_fake - rep_real
        if np.iscomplexobj(diff):
            return diff.real**2 + diff.imag**2, 2.0 * diff
        return diff**2, 2.0 * diff

    if distance is Distance.AMPLITUDE:
        amp_r = np.sqrt(np.abs(rep_real) ** 2 + eps**2)
        amp_f = np.sqrt(np.abs(rep_fake) ** 2 + eps**2)
        gap = amp_f - amp_r
        return gap**2, 2.0 * gap * rep_fake / amp_f

    # phase: 2 * (1 - cos(theta_r - theta_f)), zero where either phase is undefined
    mod_r = np.abs(rep_real)
    mod_f = np.abs(rep_fake)
    defined = (mod_r > eps) & (mod_f > eps)
    mod_r = np.where(defined, mod_r, 1.0)
    mod_f = np.where(defined, mod_f, 1.0)
    cos = (rep_real * np.conj(rep_fake)).real / (mod_r * mod_f)
    # 2 * (1 - cos) == |u_r - u_f|^2 for unit phasors; exact at zero angle
    chord = rep_real / mod_r - rep_fake / mod_f
    dist = np.where(defined, chord.real**2 + chord.imag**2, 0.0)
    dcos = rep_real / (mod_r * mod_f) - cos * rep_fake / mod_f**2
    return dist, np.where(defined, -2.0 * dcos, 0.0)


def _as_stack(images, name):
    arr = np.asarray(images, dtype=np.float64)
    if arr.ndim == 3 and name.endswith("s"):
        arr = arr[..., None]
    if arr.ndim != 4:
        raise ValueError(f"{name} must be a (B, H, W, C) stack, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has a non-finite value at index {tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])}")
    return arr


def _check_pair(reals, fakes, config):
    if reals.shape != fakes.shape:
        raise ValueError(f"shape mismatch: {reals.shape} vs {fakes.shape}")
    if reals.shape[0] == 0:
        raise ValueError("empty batch")
    p = config.patch_factor
    h, w = reals.shape[1:3]
    if h % p or w % p:
        raise ValueError(f"patch_factor {p} does not divide image size {h}x{w}")


def evaluate(reals, fakes, config: LossConfig = DEFAULT_CONFIG, need_grad: bool = True):
    """Loss and gradient for ``(B, H, W, C)`` stacks.

    Returns ``(value, grad)`` where ``grad`` has the shape of ``fakes`` and is
    the derivative of ``value`` with the weight matrix held fixed; ``grad`` is
    ``None`` when ``need_grad`` is false.
    """
    reals = _as_stack(reals, "reals")
    fakes = _as_stack(fakes, "fakes")
    _check_pair(reals, fakes, config)
    batch = reals.shape[0]
    p = config.patch_factor
    pr, pf = _patchify(reals, p), _patchify(fakes, p)

    averaged = config.batch_reduction is BatchReduction.AVERAGE_SPECTRUM
    spatial = config.distance is Distance.SPATIAL
    if spatial:
        rep_r, rep_f = pr, pf
    else:
        rep_r = _forward_transform(pr, config.transform)
        rep_f = _forward_transform(pf, config.transform)
    if averaged:
        # linear transforms commute with the batch mean
        rep_r = rep_r.mean(axis=0, keepdims=True)
        rep_f = rep_f.mean(axis=0, keepdims=True)

    dist, ddist = _distance_terms(rep_r, rep_f, config.distance, config.epsilon)
    if config.focal:
        weights = _normalized_weights(np.abs(rep_f - rep_r), config.alpha, axes=(2, 3))
    else:
        weights = np.ones_like(dist)
    count = dist.size
    value = float(np.sum(weights * dist) / count)
    if not need_grad:
        return value, None

    coeff_grad = weights * ddist / count
    if spatial:
        grad = coeff_grad.real if np.iscomplexobj(coeff_grad) else coeff_grad
    else:
        grad = _adjoint_transform(coeff_grad, config.transform)
    if averaged:
        grad = np.broadcast_to(grad / batch, pf.shape)
    return value, np.ascontiguousarray(_unpatchify(grad, p))


def _pair_stack(real, fake):
    r = as_image(real, "real")
    f = as_image(fake, "fake")
    if r.shape != f.shape:
        raise ValueError(f"shape mismatch: {r.shape} vs {f.shape}")
    return r[None], f[None]


def ffl_forward(real, fake, config: LossConfig = DEFAULT_CONFIG) -> float:
    """Focal frequency loss between two ``(H, W[, C])`` images."""
    r, f = _pair_stack(real, fake)
    return evaluate(r, f, config, need_grad=False)[0]


def ffl_backward(real, fake, config: LossConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Gradient of :func:`ffl_forward` w.r.t. ``fake``, weights held constant.

    Returned with the ``(H, W, C)`` shape of the validated fake image.
    """
    r, f = _pair_stack(real, fake)
    return evaluate(r, f, config)[1][0]


def ffl_value_and_grad(real, fake, config: LossConfig = DEFAULT_CONFIG):
    r, f = _pair_stack(real, fake)
    value, grad = evaluate(r, f, config)
    return value, grad[0]


def batch_ffl(reals, fakes, config: LossConfig = DEFAULT_CONFIG, return_grad: bool = False):
    """Loss over paired lists (or stacks) of images.

    ``mean_per_image`` averages the per-pair losses; ``average_spectrum``
    compares the batch-mean spectra once. With ``return_grad`` the result is
    ``(value, grads)`` where ``grads[i]`` is the derivative w.r.t. ``fakes[i]``.
    """
    if len(reals) == 0 or len(fakes) == 0:
        raise ValueError("empty batch")
    if len(reals) != len(fakes):
        raise ValueError(f"batch length mismatch: {len(reals)} vs {len(fakes)}")
    if isinstance(reals, np.ndarray) and reals.ndim == 4:
        r_stack, f_stack = reals, fakes
    else:
        r_list = [as_image(x, "real") for x in reals]
        f_list = [as_image(x, "fake") for x in fakes]
        shapes = {x.shape for x in r_list + f_list}
        if len(shapes) != 1:
            raise ValueError(f"ragged batch shapes: {sorted(shapes)}")
        r_stack, f_stack = np.stack(r_list), np.stack(f_list)
    value, grad = evaluate(r_stack, f_stack, config, need_grad=return_grad)
    return (value, grad) if return_grad else value
