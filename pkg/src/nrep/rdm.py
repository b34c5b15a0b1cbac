"""One-particle reduced density matrices and natural occupation spectra.

The reduced matrix of a normalized N-particle state is
rho_ij = <Psi| a_i^dag a_j |Psi>; it is Hermitian, has trace N, and its
eigenvalues (the natural occupation numbers) lie in [0, 1].  Spectra are
reported sorted decreasing.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .fock import FermionState, FormatError, OrbitalUnitary, change_basis, random_amplitudes
from . import kernels

HERM_TOL = 1e-10
EIG_RANGE_TOL = 1e-8
DIAG_RESIDUAL_TOL = 1e-8
DEGENERACY_TOL = 1e-9

__all__ = [
    "OneRDM",
    "Spectrum",
    "NaturalFrame",
    "LowdinPairing",
    "compute_rdm",
    "natural_occupations",
    "to_natural_basis",
    "hole_dual_spectrum",
    "lowdin_pairs",
    "strip_inactive",
    "sample_spectra",
    "spectra_from_amplitudes",
    "spectrum_to_json",
    "spectrum_from_json",
]


@dataclass(frozen=True)
class OneRDM:
    """Hermitian r x r reduced matrix; Hermiticity enforced at construction."""

    rank: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.rank, self.rank):
            raise ValueError(f"matrix shape {m.shape} != ({self.rank}, {self.rank})")
        defect = np.abs(m - m.conj().T).max()
        if defect > HERM_TOL:
            raise ValueError(f"matrix is not Hermitian (defect {defect:.3g})")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(self.matrix.trace().real)


@dataclass(frozen=True)
class Spectrum:
    """Occupation numbers sorted decreasing, summing to the particle count."""

    n_particles: int
    rank: int
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if len(vals) != self.rank:
            raise ValueError(f"expected {self.rank} values, got {len(vals)}")
        if any(b - a > DEGENERACY_TOL for a, b in zip(vals, vals[1:])):
            raise ValueError("values must be sorted decreasing")
        if any(v < -EIG_RANGE_TOL or v > 1 + EIG_RANGE_TOL for v in vals):
            raise ValueError(f"occupation outside [0, 1]: {vals}")
        if abs(sum(vals) - self.n_particles) > EIG_RANGE_TOL:
            raise ValueError(
                f"values sum to {sum(vals):.10g}, expected {self.n_particles}"
            )
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class NaturalFrame:
    """Natural-orbital unitary (columns = eigenvectors) with its spectrum."""

    unitary: OrbitalUnitary
    spectrum: Spectrum


@dataclass(frozen=True)
class LowdinPairing:
    """Two-electron pairing: natural-orbital index pairs with weights |a_k|^2.

    For odd rank the leftover natural orbital (occupation 0 within
    tolerance) is reported in `unpaired`.
    """

    pairs: tuple[tuple[tuple[int, int], float], ...]
    unpaired: int | None


def compute_rdm(state: FermionState) -> OneRDM:
    """rho_ij = <Psi| a_i^dag a_j |Psi> for a normalized state."""
    if not state.is_normalized():
        raise ValueError("state must be normalized")
    mat = kernels.rdm_single(state.to_vector(), state.n_particles, state.rank)
    # symmetric transition table leaves only rounding-level asymmetry
    mat = 0.5 * (mat + mat.conj().T)
    return OneRDM(state.rank, mat)


def _canonical_phase(col: np.ndarray) -> np.ndarray:
    z = col[int(np.argmax(np.abs(col)))]
    if abs(z) == 0.0:
        return col
    return col * (z.conjugate() / abs(z))


def _lex_key(col: np.ndarray) -> tuple:
    return tuple((round(c.real, 12), round(c.imag, 12)) for c in col)


def natural_occupations(rho: OneRDM) -> NaturalFrame:
    """Eigendecomposition sorted by decreasing eigenvalue, deterministically.

    Eigenvalues within DEGENERACY_TOL form a group; inside a group the
    (phase-fixed) eigenvectors are ordered lexicographically so repeated
    runs and degenerate spectra give one canonical frame.
    """
    evals, evecs = np.linalg.eigh(rho.matrix)
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    evecs = evecs[:, order]
    cols = [_canonical_phase(evecs[:, k]) for k in range(rho.rank)]

    start = 0
    while start < rho.rank:
        stop = start + 1
        while stop < rho.rank and evals[start] - evals[stop] <= DEGENERACY_TOL:
            stop += 1
        if stop - start > 1:
            group = sorted(range(start, stop), key=lambda k: _lex_key(cols[k]))
            evals[start:stop] = [evals[k] for k in group]
            cols[start:stop] = [cols[k] for k in group]
        start = stop

    u = np.column_stack(cols)
    diag = u.conj().T @ rho.matrix @ u
    off = np.abs(diag - np.diag(np.diagonal(diag))).max()
    if off > DIAG_RESIDUAL_TOL:
        raise ValueError(f"diagonalization residual {off:.3g} exceeds tolerance")
    n = int(round(rho.trace))
    spectrum = Spectrum(n, rho.rank, tuple(np.clip(evals, 0.0, 1.0)))
    return NaturalFrame(OrbitalUnitary(rho.rank, u), spectrum)


def to_natural_basis(state: FermionState) -> FermionState:
    """Re-express the state so its reduced matrix is diagonal, decreasing.

    With eigenvector matrix W (columns sorted by decreasing occupation),
    substituting psi_i -> sum_j (W^T)_ji psi_j transforms the reduced
    matrix to W^dag rho W.
    """
    frame = natural_occupations(compute_rdm(state))
    w = frame.unitary.matrix
    return change_basis(state, OrbitalUnitary(state.rank, w.T))


def hole_dual_spectrum(spectrum: Spectrum) -> Spectrum:
    """Particle-hole image: lambda -> (1 - lambda) reversed, N -> r - N."""
    vals = tuple(1.0 - v for v in reversed(spectrum.values))
    return Spectrum(spectrum.rank - spectrum.n_particles, spectrum.rank, vals)


def lowdin_pairs(state: FermionState) -> LowdinPairing:
    """Pair the doubly degenerate natural spectrum of a two-electron state.

    Natural orbitals (2k-1, 2k) share the weight |a_k|^2 of one paired
    configuration; weights are averaged over the pair.  A cross-pair
    degeneracy makes the grouping ambiguous and is reported as a warning
    (the deterministic (1,2)(3,4)... grouping is still returned).
    """
    if state.n_particles != 2:
        raise ValueError("pairing structure requires a two-electron state")
    vals = natural_occupations(compute_rdm(state)).spectrum.values
    r = state.rank
    if r % 2 == 1 and vals[-1] > EIG_RANGE_TOL:
        raise ValueError(f"odd rank needs a zero eigenvalue, got {vals[-1]:.3g}")
    npairs = r // 2
    pairs = []
    for k in range(npairs):
        a, b = vals[2 * k], vals[2 * k + 1]
        if abs(a - b) > EIG_RANGE_TOL:
            raise ValueError(f"pair ({2*k+1}, {2*k+2}) not degenerate: {a:.3g} vs {b:.3g}")
        pairs.append(((2 * k + 1, 2 * k + 2), 0.5 * (a + b)))
    for boundary in range(2, 2 * npairs, 2):
        if vals[boundary - 1] - vals[boundary] <= DEGENERACY_TOL:
            warnings.warn(
                "degenerate weights across pair boundary; pairing chosen arbitrarily",
                stacklevel=2,
            )
            break
    unpaired = r if r % 2 == 1 else None
    return LowdinPairing(tuple(pairs), unpaired)


def strip_inactive(spectrum: Spectrum, tol: float = 1e-6) -> Spectrum:
    """Drop fully filled (lambda >= 1 - tol, decrementing N) and empty
    (lambda <= tol) orbitals, keeping the active window."""
    kept = []
    n = spectrum.n_particles
    for v in spectrum.values:
        if v >= 1.0 - tol:
            n -= 1
        elif v > tol:
            kept.append(v)
    return Spectrum(n, len(kept), tuple(kept))


def spectra_from_amplitudes(amps: np.ndarray, n: int, r: int) -> np.ndarray:
    """(m, r) decreasing occupation spectra for stacked amplitude rows."""
    rhos = kernels.rdm_batch(amps, n, r)
    return np.linalg.eigvalsh(rhos)[:, ::-1]


def sample_spectra(n: int, r: int, count: int, seed: int) -> np.ndarray:
    """Spectra of `count` random states; deterministic in the seed."""
    return spectra_from_amplitudes(random_amplitudes(n, r, count, seed), n, r)


def spectrum_to_json(spectrum: Spectrum) -> str:
    return json.dumps(
        {
            "n": spectrum.n_particles,
            "r": spectrum.rank,
            "lambda": list(spectrum.values),
        },
        sort_keys=True,
    )


def spectrum_from_json(text: str) -> Spectrum:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise FormatError("spectrum document must be a JSON object")
    try:
        n = int(obj["n"])
        r = int(obj["r"])
        values = [float(v) for v in obj["lambda"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"spectrum document missing field: {exc}") from exc
    # domain violations (range, order, sum) propagate as ValueError so
    # callers can report inadmissibility instead of a parse failure
    return Spectrum(n, r, tuple(values))
