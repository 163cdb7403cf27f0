"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np

from seqprod import Effect, EffectDecomposition, DensityOperator, haar_unitary


def complex_gaussian(rng: np.random.Generator, dim: int) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_hermitian(rng, dim, scale=1.0) -> np.ndarray:
    g = complex_gaussian(rng, dim) * scale
    return (g + g.conj().T) / 2


def random_effect(rng, dim) -> Effect:
    return Effect.from_eigensystem(rng.uniform(0.0, 1.0, dim), haar_unitary(dim, rng))


def random_projection_matrix(rng, dim, rank) -> np.ndarray:
    lam = np.zeros(dim)
    lam[:rank] = 1.0
    v = haar_unitary(dim, rng)
    return (v * lam) @ v.conj().T


def random_density(rng, dim) -> DensityOperator:
    g = complex_gaussian(rng, dim)
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real)


def random_effect_decomposition(rng, dim, count) -> EffectDecomposition:
    """count effects summing to I, built by whitening count-1 random Wisharts.

    A ridge keeps the total well conditioned so the whitened sum matches the
    identity to near machine precision.
    """
    parts = []
    for _ in range(count - 1):
        g = complex_gaussian(rng, dim)
        parts.append(g @ g.conj().T)
    ridge = 0.1 + float(rng.uniform(0.0, 0.4))
    total = sum(parts) + ridge * np.eye(dim) if parts else ridge * np.eye(dim)
    w, v = np.linalg.eigh(total)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    effects = [Effect(inv_sqrt @ p @ inv_sqrt) for p in parts]
    effects.append(Effect(ridge * (inv_sqrt @ inv_sqrt)))
    return EffectDecomposition(effects)


def power_iteration_norm(m: np.ndarray, iters: int = 500) -> float:
    """Independent spectral-norm estimate: power iteration on M†M."""
    gram = m.conj().T @ m
    x = np.ones(gram.shape[0], dtype=np.complex128)
    x /= np.linalg.norm(x)
    for _ in range(iters):
        y = gram @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
    return float(np.sqrt((x.conj() @ gram @ x).real))
