"""Pure numpy versions of the compiled kernels in ``_core.pyx``.

Same signatures and results; used when the extension is not built or when
``MFREQLAB_BACKEND=python`` is set.
"""

import numpy as np


def _pair_distances(samples):
    diff = samples[None, :, :] - samples[:, None, :]
    return np.sqrt(np.sum(diff.real**2 + diff.imag**2, axis=-1))


def variation_power(samples, r):
    samples = np.asarray(samples, dtype=complex)
    T = samples.shape[0]
    if T < 2:
        return 0.0
    inc = _pair_distances(samples) ** r
    best = np.zeros(T)
    for j in range(1, T):
        best[j] = max(0.0, float(np.max(best[:j] + inc[:j, j])))
    return float(best.max())


def variation_batch(values, r):
    values = np.asarray(values, dtype=complex)
    X, T = values.shape[:2]
    if T < 2:
        return np.zeros(X)
    best = np.zeros((X, T))
    for j in range(1, T):
        diff = values[:, j : j + 1, :] - values[:, :j, :]
        inc = np.sqrt(np.sum(diff.real**2 + diff.imag**2, axis=-1)) ** r
        best[:, j] = np.maximum(0.0, np.max(best[:, :j] + inc, axis=1))
    return best.max(axis=1) ** (1.0 / r)


def greedy_jump_count(samples, lam):
    samples = np.asarray(samples, dtype=complex)
    anchor = 0
    count = 0
    for t in range(1, samples.shape[0]):
        if np.linalg.norm(samples[t] - samples[anchor]) >= lam:
            count += 1
            anchor = t
    return count


def max_jump_count(samples, lam):
    samples = np.asarray(samples, dtype=complex)
    T = samples.shape[0]
    if T < 2:
        return 0
    ok = _pair_distances(samples) >= lam
    best = np.zeros(T, dtype=np.int64)
    for j in range(1, T):
        cand = np.where(ok[:j, j], best[:j] + 1, 0)
        best[j] = cand.max()
    return int(best.max())


def gauss_residue_counts(a, b, q, d):
    b = np.asarray(b, dtype=np.int64)
    n = b.shape[0]
    axes = np.meshgrid(*([np.arange(q, dtype=np.int64)] * n), indexing="ij")
    norm2 = np.zeros(axes[0].shape, dtype=np.int64)
    lin = np.zeros(axes[0].shape, dtype=np.int64)
    for i, r in enumerate(axes):
        norm2 = (norm2 + r * r) % q
        lin = (lin + b[i] * r) % q
    p = np.ones_like(norm2) % q
    for _ in range(d):
        p = (p * norm2) % q
    phase = ((a % q) * p + lin) % q
    return np.bincount(phase.ravel(), minlength=q).astype(np.int64)
