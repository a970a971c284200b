"""Small multilayer perceptrons with explicit reverse-mode backpropagation
and an adaptive-moment optimizer. Everything is numpy; gradients are exact
(finite-difference checked in the test suite).

Forward/backward reuse persistent per-batch-size workspaces and write through
out= parameters: the layer activations are ~256 KB each, which is past the
allocator's mmap threshold, and allocating them fresh every call costs more
in page faults than the matmuls themselves. Consequence: arrays returned by
forward/backward are overwritten by the next call on the same instance —
copy them if they must outlive it.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import RoverGymError


class NonFiniteGradient(RoverGymError):
    """Backpropagation produced NaN/inf; training should abort."""


class Mlp:
    """Fully connected net: tanh hidden layers, linear output.

    Parameters are a flat list [W1, b1, W2, b2, ...]; gradient lists mirror
    that layout. dtype float64 is the default; the off-policy learner uses
    float32 instances for speed (same formulas, narrower arithmetic).
    """

    def __init__(self, sizes: list[int], rng: np.random.Generator,
                 out_scale: float = 1.0, dtype=np.float64):
        self.sizes = list(sizes)
        self.dtype = dtype
        self.params: list[np.ndarray] = []
        last = len(sizes) - 2
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            scale = (out_scale if i == last else 1.0) / math.sqrt(fan_in)
            self.params.append(
                rng.normal(0.0, scale, size=(fan_in, fan_out)).astype(dtype))
            self.params.append(np.zeros(fan_out, dtype=dtype))
        self._fwd_ws: dict[int, list[np.ndarray]] = {}
        self._bwd_ws: dict[int, list[np.ndarray]] = {}
        self._grad_ws: list[np.ndarray] | None = None

    @property
    def n_layers(self) -> int:
        return len(self.sizes) - 1

    def _buffers(self, store: dict, n: int, widths) -> list[np.ndarray]:
        bufs = store.get(n)
        if bufs is None:
            bufs = [np.empty((n, w), dtype=self.dtype) for w in widths]
            store[n] = bufs
        return bufs

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Returns (output, cache); x is (batch, in) or (in,). The cache and
        output live in reused workspaces."""
        h = np.atleast_2d(np.asarray(x, dtype=self.dtype))
        bufs = self._buffers(self._fwd_ws, h.shape[0], self.sizes[1:])
        cache = [h]
        for layer in range(self.n_layers):
            w, b = self.params[2 * layer], self.params[2 * layer + 1]
            z = bufs[layer]
            np.matmul(h, w, out=z)
            z += b
            if layer != self.n_layers - 1:
                np.tanh(z, out=z)
            h = z
            cache.append(h)
        return h, cache

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(self, cache: list[np.ndarray],
                 grad_out: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        """Exact gradients of sum(grad_out * output) w.r.t. params and input.
        Returned arrays are workspace views; copy to retain."""
        g_in = np.atleast_2d(np.asarray(grad_out, dtype=self.dtype))
        n = g_in.shape[0]
        # one flow buffer per layer width (incl. the input width) and one
        # tanh-derivative scratch per hidden layer
        flow = self._buffers(self._bwd_ws, n, self.sizes + self.sizes[1:-1])
        if self._grad_ws is None:
            self._grad_ws = [np.empty_like(p) for p in self.params]
        grads = self._grad_ws
        g = flow[self.n_layers]
        np.copyto(g, g_in)
        for layer in range(self.n_layers - 1, -1, -1):
            w = self.params[2 * layer]
            h_in, h_out = cache[layer], cache[layer + 1]
            if layer != self.n_layers - 1:
                t = flow[len(self.sizes) + layer]
                np.multiply(h_out, h_out, out=t)
                np.subtract(1.0, t, out=t)
                g *= t
            np.matmul(h_in.T, g, out=grads[2 * layer])
            np.sum(g, axis=0, out=grads[2 * layer + 1])
            np.matmul(g, w.T, out=flow[layer])
            g = flow[layer]
        # any NaN/inf entry makes the sum non-finite, so one reduce per
        # array is enough for the divergence check
        if not all(math.isfinite(float(gr.sum())) for gr in grads):
            raise NonFiniteGradient("non-finite parameter gradient")
        return grads, g

    # -- flat views for checkpoints and finite-difference checks -------------
    def get_flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params])

    def set_flat(self, flat: np.ndarray) -> None:
        offset = 0
        for p in self.params:
            p[...] = flat[offset:offset + p.size].reshape(p.shape)
            offset += p.size
        if offset != flat.size:
            raise ValueError("flat vector size mismatch")


class Adam:
    """Adaptive-moment estimation over a list of parameter arrays."""

    def __init__(self, params: list[np.ndarray], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self._tmp = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for p, g, m, v, tmp in zip(params, grads, self.m, self.v, self._tmp):
            m *= self.beta1
            np.multiply(g, 1.0 - self.beta1, out=tmp)
            m += tmp
            v *= self.beta2
            np.multiply(g, g, out=tmp)
            tmp *= 1.0 - self.beta2
            v += tmp
            np.divide(v, b2t, out=tmp)
            np.sqrt(tmp, out=tmp)
            tmp += self.eps
            np.divide(m, tmp, out=tmp)
            tmp *= self.lr / b1t
            p -= tmp


def polyak_update(target_params: list[np.ndarray], params: list[np.ndarray],
                  tau: float, _scratch: dict = {}) -> None:
    """theta_target <- tau * theta + (1 - tau) * theta_target, in place."""
    for tp, p in zip(target_params, params):
        key = (tp.shape, tp.dtype.str)
        tmp = _scratch.get(key)
        if tmp is None:
            tmp = _scratch[key] = np.empty_like(tp)
        tp *= (1.0 - tau)
        np.multiply(p, tau, out=tmp)
        tp += tmp
