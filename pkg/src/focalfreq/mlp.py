"""Two-layer MLP autoencoder with hand-written backprop, and Adam."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PARAM_NAMES = ("enc_w", "enc_b", "dec_w", "dec_b")


@dataclass
class MlpAutoencoder:
    """``tanh(W_d @ relu(W_e @ x + b_e) + b_d)`` on flattened images.

    Weights are stored output-major: ``enc_w`` is ``(hidden, D)`` and
    ``dec_w`` is ``(D, hidden)``.
    """

    enc_w: np.ndarray
    enc_b: np.ndarray
    dec_w: np.ndarray
    dec_b: np.ndarray

    @classmethod
    def initialize(cls, dim: int, hidden: int = 256, std: float = 0.02, seed: int = 0):
        rng = np.random.default_rng(seed)
        return cls(
            enc_w=rng.normal(0.0, std, size=(hidden, dim)),
            enc_b=np.zeros(hidden),
            dec_w=rng.normal(0.0, std, size=(dim, hidden)),
            dec_b=np.zeros(dim),
        )

    @property
    def dim(self) -> int:
        return self.enc_w.shape[1]

    @property
    def hidden(self) -> int:
        return self.enc_w.shape[0]

    def params(self) -> list[np.ndarray]:
        return [getattr(self, name) for name in PARAM_NAMES]

    def set_params(self, params):
        for name, value in zip(PARAM_NAMES, params):
            setattr(self, name, value)


def _flat(model, batch):
    x = np.asarray(batch, dtype=np.float64).reshape(len(batch), -1)
    if x.shape[1] != model.dim:
        raise ValueError(f"input dimension {x.shape[1]} does not match model dimension {model.dim}")
    return x


def mlp_forward(model: MlpAutoencoder, batch, return_cache: bool = False):
    """Reconstruct a batch; output has the batch's shape."""
    x = _flat(model, batch)
    pre_h = x @ model.enc_w.T + model.enc_b
    hid = np.maximum(pre_h, 0.0)
    out = np.tanh(hid @ model.dec_w.T + model.dec_b)
    recon = out.reshape(np.shape(batch))
    if return_cache:
        return recon, (x, pre_h, hid, out)
    return recon


def mlp_backward(model: MlpAutoencoder, batch, grad_recon, cache=None) -> list[np.ndarray]:
    """Parameter gradients given ``d loss / d reconstruction``.

    Returned in :data:`PARAM_NAMES` order.
    """
    if cache is None:
        _, cache = mlp_forward(model, batch, return_cache=True)
    x, pre_h, hid, out = cache
    g_out = np.asarray(grad_recon, dtype=np.float64).reshape(out.shape)
    g_pre_out = g_out * (1.0 - out**2)
    g_dec_w = g_pre_out.T @ hid
    g_dec_b = g_pre_out.sum(axis=0)
    g_pre_h = (g_pre_out @ model.dec_w) * (pre_h > 0)
    g_enc_w = g_pre_h.T @ x
    g_enc_b = g_pre_h.sum(axis=0)
    return [g_enc_w, g_enc_b, g_dec_w, g_dec_b]


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    @classmethod
    def for_params(cls, params, **kwargs):
        return cls(m=[np.zeros_like(p) for p in params], v=[np.zeros_like(p) for p in params], **kwargs)


def adam_step(state: AdamState, params, grads) -> list[np.ndarray]:
    """Bias-corrected Adam update; moment buffers in ``state`` advance in place."""
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    state.step += 1
    c1 = 1.0 - state.beta1**state.step
    c2 = 1.0 - state.beta2**state.step
    updated = []
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter {p.shape}")
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g
        m_hat = state.m[i] / c1
        v_hat = state.v[i] / c2
        updated.append(p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps))
    return updated
