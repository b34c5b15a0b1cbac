"""Pure-numpy fallback implementations of the hot kernels."""

from __future__ import annotations

import numpy as np

NAME = "pure"

# chunk budget for the minor-determinant stack, in complex128 elements
_CHUNK_ELEMENTS = 4_000_000


def rdm_batch(amps, src, dst, sign, flat, group_starts, group_flat, r):
    m = amps.shape[0]
    contrib = sign * amps[:, src] * amps[:, dst].conj()
    sums = np.add.reduceat(contrib, group_starts, axis=1)
    out = np.zeros((m, r * r), dtype=np.complex128)
    out[:, group_flat] = sums
    return out.reshape(m, r, r)


def compound_matrix(u, dets):
    dim, n = dets.shape
    rows = u[dets]  # (dim, n, r): one-particle rows gathered per determinant
    out = np.empty((dim, dim), dtype=np.complex128)
    chunk = max(1, _CHUNK_ELEMENTS // (dim * n * n))
    for start in range(0, dim, chunk):
        stop = min(start + chunk, dim)
        # minors[p, q, a, b] = u[dets[p, a], dets[q, b]]
        minors = rows[start:stop][:, :, dets.T].swapaxes(2, 3).swapaxes(1, 2)
        out[start:stop] = np.linalg.det(np.ascontiguousarray(minors))
    return out
