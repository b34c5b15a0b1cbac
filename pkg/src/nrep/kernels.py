"""Hot numeric kernels with a compiled backend and a pure-numpy fallback.

The compiled extension nrep._kernels is preferred when importable; set
NREP_PURE=1 to force the numpy fallback.  Both backends implement the
same two functions:

  rdm_batch(amps, src, dst, sign, flat, group_starts, group_flat, r)
      batched one-particle reduced density matrices from a transition
      table: rho[s, i, j] = sum sign * conj(amps[s, dst]) * amps[s, src]
      over table rows belonging to (i, j).

  compound_matrix(u, dets)
      exterior-power matrix M[p, q] = det(u[dets[p], :][:, dets[q]]).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

if os.environ.get("NREP_PURE"):
    from . import _kernels_py as _backend
else:
    try:
        from . import _kernels as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _backend

BACKEND = _backend.NAME


def available_backends() -> dict:
    """Importable backend modules keyed by name."""
    from . import _kernels_py

    found = {_kernels_py.NAME: _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]

        found[_kernels.NAME] = _kernels
    except ImportError:
        pass
    return found


@dataclass(frozen=True)
class TransitionTable:
    """Flattened a_i^dag a_j transitions for one (n, r) determinant basis.

    Row t says: applying a_i^dag a_j (0-based i = flat[t] // r,
    j = flat[t] % r) to basis determinant src[t] yields sign[t] times
    basis determinant dst[t].  Rows are sorted by flat so that grouped
    reduction works with np.add.reduceat.
    """

    n: int
    r: int
    dim: int
    src: np.ndarray
    dst: np.ndarray
    sign: np.ndarray
    flat: np.ndarray
    group_starts: np.ndarray
    group_flat: np.ndarray


@lru_cache(maxsize=None)
def dets_array(n: int, r: int) -> np.ndarray:
    """Basis determinants as a (dim, n) int64 array of 0-based orbitals."""
    from .fock import slater_basis

    basis = slater_basis(n, r)
    arr = np.array(basis, dtype=np.int64) - 1
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=None)
def transition_table(n: int, r: int) -> TransitionTable:
    from .fock import SlaterDet, _basis_index, slater_basis

    basis = slater_basis(n, r)
    index = _basis_index(n, r)
    src_l: list[int] = []
    dst_l: list[int] = []
    sign_l: list[float] = []
    flat_l: list[int] = []
    for q, det in enumerate(basis):
        for pos_j, j in enumerate(det):
            sign_j = -1.0 if pos_j % 2 else 1.0
            reduced = det[:pos_j] + det[pos_j + 1 :]
            for i in range(1, r + 1):
                if i in reduced:
                    continue
                pos_i = sum(1 for o in reduced if o < i)
                sign_i = -1.0 if pos_i % 2 else 1.0
                target = SlaterDet(reduced[:pos_i] + (i,) + reduced[pos_i:])
                src_l.append(q)
                dst_l.append(index[target])
                sign_l.append(sign_i * sign_j)
                flat_l.append((i - 1) * r + (j - 1))
    flat = np.array(flat_l, dtype=np.int64)
    order = np.argsort(flat, kind="stable")
    flat = flat[order]
    src = np.array(src_l, dtype=np.int64)[order]
    dst = np.array(dst_l, dtype=np.int64)[order]
    sign = np.array(sign_l, dtype=np.float64)[order]
    group_flat, group_starts = np.unique(flat, return_index=True)
    for a in (src, dst, sign, flat, group_starts, group_flat):
        a.flags.writeable = False
    return TransitionTable(
        n, r, len(basis), src, dst, sign, flat, group_starts, group_flat
    )


def rdm_batch(amps: np.ndarray, n: int, r: int) -> np.ndarray:
    """(m, r, r) reduced density matrices for m stacked amplitude rows."""
    amps = np.ascontiguousarray(np.atleast_2d(amps), dtype=np.complex128)
    t = transition_table(n, r)
    if amps.shape[1] != t.dim:
        raise ValueError(f"amplitude rows have length {amps.shape[1]}, expected {t.dim}")
    return _backend.rdm_batch(
        amps, t.src, t.dst, t.sign, t.flat, t.group_starts, t.group_flat, r
    )


def rdm_single(vec: np.ndarray, n: int, r: int) -> np.ndarray:
    return rdm_batch(vec[np.newaxis, :], n, r)[0]


def compound_matrix(u: np.ndarray, n: int, r: int) -> np.ndarray:
    """Exterior-power matrix of u acting on the (n, r) determinant basis."""
    u = np.ascontiguousarray(u, dtype=np.complex128)
    if u.shape != (r, r):
        raise ValueError(f"matrix shape {u.shape} != ({r}, {r})")
    return _backend.compound_matrix(u, dets_array(n, r))
