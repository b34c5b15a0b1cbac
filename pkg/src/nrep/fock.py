"""Second-quantized fermion states on small antisymmetric spaces.

States live in the N-particle antisymmetric subspace of an r-orbital
one-particle space.  Orbital indices are 1-based.  Everything is desk
scale: r <= 14 keeps the largest determinant basis at C(14, 7) = 3432,
so states are held as sparse amplitude maps and all operator actions
are exact.

Sign convention: acting on an occupied-orbital tuple, an annihilator
a_i contributes (-1)**(p-1) where p is the 1-based position of i in the
tuple; a creator a_i^dag contributes (-1)**(p-1) where p is the 1-based
position i takes after insertion.  Equivalently the phase counts the
occupied orbitals below i.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

MAX_RANK = 14
PRUNE_TOL = 1e-15
NORM_TOL = 1e-10

__all__ = [
    "MAX_RANK",
    "FormatError",
    "SlaterDet",
    "FermionState",
    "OrbitalUnitary",
    "slater_basis",
    "apply_annihilator",
    "apply_creator",
    "number_expectation",
    "change_basis",
    "random_state",
    "random_amplitudes",
    "random_unitary",
    "inner_product",
    "hole_dual_state",
    "state_to_json",
    "state_from_json",
]


class FormatError(ValueError):
    """A serialized object failed schema validation."""


class SlaterDet(tuple):
    """Strictly increasing tuple of occupied 1-based orbital indices."""

    def __new__(cls, orbitals: Iterable[int]) -> "SlaterDet":
        det = super().__new__(cls, (int(o) for o in orbitals))
        if det and det[0] < 1:
            raise ValueError(f"orbital indices are 1-based, got {tuple(det)}")
        if any(a >= b for a, b in zip(det, det[1:])):
            raise ValueError(f"orbitals must be strictly increasing, got {tuple(det)}")
        return det

    def occupies(self, orbital: int) -> bool:
        return orbital in self


@dataclass(frozen=True)
class FermionState:
    """Sparse amplitude map over Slater determinants at fixed (N, r).

    The amplitude dict is canonicalized at construction (keys coerced to
    SlaterDet, entries below PRUNE_TOL dropped) and must not be mutated
    afterwards.  N = 0 is allowed so that annihilation stays closed; the
    empty determinant () is the vacuum.
    """

    n_particles: int
    rank: int
    amplitudes: Mapping[SlaterDet, complex]

    def __post_init__(self) -> None:
        if not 0 <= self.n_particles <= self.rank <= MAX_RANK:
            raise ValueError(
                f"need 0 <= N <= r <= {MAX_RANK}, got N={self.n_particles}, r={self.rank}"
            )
        clean: dict[SlaterDet, complex] = {}
        for det, amp in self.amplitudes.items():
            if not isinstance(det, SlaterDet):
                det = SlaterDet(det)
            if len(det) != self.n_particles:
                raise ValueError(f"determinant {tuple(det)} has wrong particle count")
            if det and det[-1] > self.rank:
                raise ValueError(f"determinant {tuple(det)} exceeds rank {self.rank}")
            amp = complex(amp)
            if abs(amp) > PRUNE_TOL:
                clean[det] = amp
        object.__setattr__(self, "amplitudes", clean)

    def amplitude(self, det: Iterable[int]) -> complex:
        key = det if isinstance(det, SlaterDet) else SlaterDet(det)
        return self.amplitudes.get(key, 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def normalize(self) -> "FermionState":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero state")
        return FermionState(
            self.n_particles,
            self.rank,
            {d: a / nrm for d, a in self.amplitudes.items()},
        )

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def to_vector(self) -> np.ndarray:
        """Dense amplitude vector in slater_basis(N, r) order."""
        basis = slater_basis(self.n_particles, self.rank)
        index = _basis_index(self.n_particles, self.rank)
        vec = np.zeros(len(basis), dtype=complex)
        for det, amp in self.amplitudes.items():
            vec[index[det]] = amp
        return vec

    @classmethod
    def from_vector(cls, n: int, r: int, vec: np.ndarray) -> "FermionState":
        basis = slater_basis(n, r)
        if len(vec) != len(basis):
            raise ValueError(f"vector length {len(vec)} != basis size {len(basis)}")
        return cls(n, r, {d: complex(a) for d, a in zip(basis, vec)})

    def __repr__(self) -> str:
        terms = ", ".join(
            f"{tuple(d)}: {a:.6g}" for d, a in sorted(self.amplitudes.items())
        )
        return f"FermionState(N={self.n_particles}, r={self.rank}, {{{terms}}})"


@dataclass(frozen=True)
class OrbitalUnitary:
    """Unitary change of one-particle basis, validated at construction."""

    rank: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.rank, self.rank):
            raise ValueError(f"matrix shape {m.shape} != ({self.rank}, {self.rank})")
        defect = np.abs(m.conj().T @ m - np.eye(self.rank)).max()
        if defect > 1e-10:
            raise ValueError(f"matrix is not unitary (defect {defect:.3g})")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


@lru_cache(maxsize=None)
def slater_basis(n: int, r: int) -> tuple[SlaterDet, ...]:
    """All N-particle determinants over r orbitals, lexicographic order."""
    if not (1 <= n <= r <= MAX_RANK):
        raise ValueError(f"need 1 <= n <= r <= {MAX_RANK}, got n={n}, r={r}")
    return tuple(SlaterDet(c) for c in combinations(range(1, r + 1), n))


@lru_cache(maxsize=None)
def _basis_index(n: int, r: int) -> dict[SlaterDet, int]:
    return {det: k for k, det in enumerate(slater_basis(n, r))}


def apply_annihilator(i: int, state: FermionState) -> FermionState:
    """a_i applied termwise; determinants not containing i drop out."""
    if not 1 <= i <= state.rank:
        raise ValueError(f"orbital {i} outside 1..{state.rank}")
    out: dict[SlaterDet, complex] = {}
    for det, amp in state.amplitudes.items():
        if i not in det:
            continue
        p = det.index(i)  # 0-based position == count of occupied below i
        sign = -1.0 if p % 2 else 1.0
        new = SlaterDet(det[:p] + det[p + 1 :])
        out[new] = out.get(new, 0j) + sign * amp
    n_out = max(state.n_particles - 1, 0)
    return FermionState(n_out, state.rank, out)


def apply_creator(i: int, state: FermionState) -> FermionState:
    """a_i^dag applied termwise; determinants already containing i drop out."""
    if not 1 <= i <= state.rank:
        raise ValueError(f"orbital {i} outside 1..{state.rank}")
    if state.n_particles >= state.rank:
        return FermionState(state.rank, state.rank, {})
    out: dict[SlaterDet, complex] = {}
    for det, amp in state.amplitudes.items():
        if i in det:
            continue
        p = sum(1 for o in det if o < i)
        sign = -1.0 if p % 2 else 1.0
        new = SlaterDet(det[:p] + (i,) + det[p:])
        out[new] = out.get(new, 0j) + sign * amp
    return FermionState(state.n_particles + 1, state.rank, out)


def number_expectation(state: FermionState, orbitals: Iterable[int]) -> float:
    """<sum_{i in s} n_i> for a normalized state."""
    if not state.is_normalized():
        raise ValueError("state must be normalized")
    s = frozenset(int(i) for i in orbitals)
    if s and (min(s) < 1 or max(s) > state.rank):
        raise ValueError(f"orbital set {sorted(s)} outside 1..{state.rank}")
    return sum(abs(a) ** 2 * len(s.intersection(d)) for d, a in state.amplitudes.items())


def change_basis(state: FermionState, u: OrbitalUnitary) -> FermionState:
    """Rewrite the state after replacing each orbital psi_i by sum_j U_ji psi_j.

    Wedge products re-expand through determinant minors: the amplitude
    carried from determinant D to D' is det(U[D', D]).  Norms and inner
    products are preserved since the minor matrix is the exterior power
    of a unitary.
    """
    if u.rank != state.rank:
        raise ValueError(f"unitary rank {u.rank} != state rank {state.rank}")
    if state.n_particles == 0:
        return state
    from . import kernels

    m = kernels.compound_matrix(u.matrix, state.n_particles, state.rank)
    return FermionState.from_vector(
        state.n_particles, state.rank, m @ state.to_vector()
    )


def inner_product(a: FermionState, b: FermionState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if (a.n_particles, a.rank) != (b.n_particles, b.rank):
        raise ValueError("states live on different spaces")
    if len(a.amplitudes) > len(b.amplitudes):
        return inner_product(b, a).conjugate()
    return sum(
        amp.conjugate() * b.amplitudes.get(det, 0j)
        for det, amp in a.amplitudes.items()
    )


def random_amplitudes(n: int, r: int, count: int, seed: int) -> np.ndarray:
    """(count, C(r, n)) unit rows of complex standard Gaussians; deterministic."""
    dim = len(slater_basis(n, r))
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    return amps


def random_state(n: int, r: int, seed: int) -> FermionState:
    """One Haar-like normalized state (complex Gaussian amplitudes)."""
    return FermionState.from_vector(n, r, random_amplitudes(n, r, 1, seed)[0])


def random_unitary(r: int, seed: int) -> OrbitalUnitary:
    """Haar-distributed unitary via QR with positive diagonal phases."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
    q, rmat = np.linalg.qr(z)
    d = np.diagonal(rmat)
    q = q * (d / np.abs(d))
    return OrbitalUnitary(r, q)


def hole_dual_state(state: FermionState) -> FermionState:
    """The (r-N)-particle dual built on complementary determinants.

    Each determinant maps to its complement with the sign of the
    permutation sorting (D, D^c), amplitudes conjugated.  Occupation of
    every orbital is 1 minus the original, so the occupation spectrum
    maps to (1 - lambda) reversed.
    """
    full = range(1, state.rank + 1)
    out: dict[SlaterDet, complex] = {}
    for det, amp in state.amplitudes.items():
        comp = tuple(o for o in full if o not in det)
        # inversions between the blocks D and D^c of the concatenation
        inv = sum(1 for d in det for c in comp if d > c)
        sign = -1.0 if inv % 2 else 1.0
        out[SlaterDet(comp)] = sign * amp.conjugate()
    return FermionState(state.rank - state.n_particles, state.rank, out)


def state_to_json(state: FermionState) -> str:
    records = [
        {"orbitals": list(det), "re": amp.real, "im": amp.imag}
        for det, amp in sorted(state.amplitudes.items())
    ]
    return json.dumps(
        {"n": state.n_particles, "r": state.rank, "amplitudes": records},
        sort_keys=True,
    )


def state_from_json(text: str) -> FermionState:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise FormatError("state document must be a JSON object")
    try:
        n = int(obj["n"])
        r = int(obj["r"])
        records = obj["amplitudes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"state document missing field: {exc}") from exc
    if not isinstance(records, list):
        raise FormatError("'amplitudes' must be a list")
    amps: dict[SlaterDet, complex] = {}
    for rec in records:
        try:
            orbitals = rec["orbitals"]
            amp = complex(float(rec["re"]), float(rec.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad amplitude record {rec!r}: {exc}") from exc
        try:
            det = SlaterDet(orbitals)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
        if det in amps:
            raise FormatError(f"duplicate determinant {tuple(det)}")
        amps[det] = amp
    try:
        return FermionState(n, r, amps)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
