"""Saturated-constraint detection and the structure of pinned states.

When a valid occupation-spectrum constraint with 0/1 coefficients and
integer bound k is exactly saturated, the state is an eigenvector of
sum_{i in S} n_i with eigenvalue k, so every contributing determinant
must intersect S in exactly k orbitals.  That selection rule shrinks the
admissible determinant basis; for the (3, 7) case pinned to the last
three quadruple constraints it leaves the four-determinant form

    alpha [1,2,3] + beta [1,4,5] + gamma [1,6,7] + delta [2,4,6]

whose squared amplitudes are read off the occupation numbers.  The
(3, 6) system pinned to one orbital per symmetric pair (i, 7-i) reduces
to three qubits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .constraints import AffineConstraint, ConstraintSet, evaluate
from .fock import FermionState, SlaterDet, slater_basis

EXPERIMENTAL_PIN_TOL = 1e-5
SYNTHETIC_PIN_TOL = 1e-10

FOUR_DET_SUPPORT = (
    SlaterDet((1, 2, 3)),
    SlaterDet((1, 4, 5)),
    SlaterDet((1, 6, 7)),
    SlaterDet((2, 4, 6)),
)
BD_PAIRS = ((1, 6), (2, 5), (3, 4))

__all__ = [
    "EXPERIMENTAL_PIN_TOL",
    "SYNTHETIC_PIN_TOL",
    "FOUR_DET_SUPPORT",
    "BD_PAIRS",
    "PinningReport",
    "SelectionRule",
    "StructuredAmplitudes",
    "UnsupportedRuleError",
    "InconsistentStructureError",
    "detect",
    "selection_rule",
    "filter_basis",
    "verify_pinned_state",
    "four_determinant_state",
    "reconstruct_structured",
    "bd_three_qubit",
]


class UnsupportedRuleError(ValueError):
    """Constraint shape does not admit a determinant selection rule."""


class InconsistentStructureError(ValueError):
    """Spectrum is incompatible with the four-determinant structure."""


@dataclass(frozen=True)
class PinningReport:
    """All constraints sorted by |residual|; saturated entries lead."""

    entries: tuple[tuple[str, float, str], ...]  # (label, residual, status)
    tol: float

    def saturated(self) -> tuple[tuple[str, float, str], ...]:
        return tuple(e for e in self.entries if e[2] == "saturated")

    def saturated_labels(self) -> tuple[str, ...]:
        return tuple(e[0] for e in self.saturated())


@dataclass(frozen=True)
class SelectionRule:
    """Admissible determinants satisfy |det intersect orbital_set| = count."""

    orbital_set: frozenset[int]
    count: int

    def admits(self, det: Iterable[int]) -> bool:
        return len(self.orbital_set.intersection(det)) == self.count


@dataclass(frozen=True)
class StructuredAmplitudes:
    """Squared moduli of the four-determinant decomposition (phases lost)."""

    alpha_sq: float
    beta_sq: float
    gamma_sq: float
    delta_sq_estimates: tuple[float, float, float]
    residual: float

    @property
    def delta_sq(self) -> float:
        return sum(self.delta_sq_estimates) / 3.0


def detect(spec, cset: ConstraintSet, tol: float = EXPERIMENTAL_PIN_TOL) -> PinningReport:
    """Evaluate and rank constraints by closeness to their bound."""
    report = evaluate(cset, spec, tol)
    entries = sorted(report.entries, key=lambda e: abs(e.residual))
    return PinningReport(tuple((e.label, e.residual, e.status) for e in entries), tol)


def selection_rule(c: AffineConstraint, n: int) -> SelectionRule:
    """Determinant rule from a saturated 0/1 constraint with integer bound."""
    support = []
    for i, coeff in enumerate(c.coefficients, start=1):
        if coeff == 1:
            support.append(i)
        elif coeff != 0:
            raise UnsupportedRuleError(
                f"constraint {c.label!r} has non-0/1 coefficient {coeff}"
            )
    if c.bound.denominator != 1:
        raise UnsupportedRuleError(f"constraint {c.label!r} has non-integer bound {c.bound}")
    k = int(c.bound)
    if not 0 <= k <= min(len(support), n):
        raise UnsupportedRuleError(
            f"bound {k} outside 0..min(|S|={len(support)}, N={n})"
        )
    return SelectionRule(frozenset(support), k)


def filter_basis(n: int, r: int, rules: Sequence[SelectionRule]) -> list[SlaterDet]:
    """Determinants of slater_basis(n, r) admitted by every rule."""
    return [d for d in slater_basis(n, r) if all(rule.admits(d) for rule in rules)]


def verify_pinned_state(state: FermionState, rule: SelectionRule) -> float:
    """|| (sum_{i in S} n_i - k) Psi ||; zero iff Psi is a k-eigenvector.

    The counting operator is diagonal on determinants, so the residual is
    sqrt(sum |c_D|^2 (|D intersect S| - k)^2).
    """
    if not state.is_normalized():
        raise ValueError("state must be normalized")
    total = 0.0
    for det, amp in state.amplitudes.items():
        mismatch = len(rule.orbital_set.intersection(det)) - rule.count
        total += abs(amp) ** 2 * mismatch * mismatch
    return float(np.sqrt(total))


def four_determinant_state(
    alpha: complex, beta: complex, gamma: complex, delta: complex
) -> FermionState:
    """The pinned (3, 7) form; amplitudes are normalized if needed."""
    amps = dict(zip(FOUR_DET_SUPPORT, (alpha, beta, gamma, delta)))
    state = FermionState(3, 7, amps)
    return state if state.is_normalized() else state.normalize()


def reconstruct_structured(spec, tol: float = EXPERIMENTAL_PIN_TOL) -> StructuredAmplitudes:
    """Read the four squared amplitudes off a pinned (3, 7) spectrum.

    Input is the seven occupation numbers in the orbital labeling that
    realizes the four-determinant form (for data like the beryllium
    spectrum the decreasing order already is that labeling).  Pinning of
    the three structure constraints

        l1+l3+l4+l6 = 2,  l1+l2+l5+l6 = 2,  l1+l2+l4+l7 = 2

    is required within tol.  |delta|^2 comes out three ways
    (l2-l3, l4-l5, l6-l7); their max pairwise difference is the
    consistency residual.
    """
    values = tuple(float(v) for v in (spec.values if hasattr(spec, "values") else spec))
    if len(values) != 7:
        raise ValueError(f"expected 7 occupation numbers, got {len(values)}")
    for idx in ((1, 3, 4, 6), (1, 2, 5, 6), (1, 2, 4, 7)):
        total = sum(values[i - 1] for i in idx)
        if abs(total - 2.0) > tol:
            raise ValueError(
                f"spectrum not pinned: sum over {idx} is {total:.8f}, expected 2"
            )
    alpha_sq, beta_sq, gamma_sq = values[2], values[4], values[6]
    estimates = (
        values[1] - values[2],
        values[3] - values[4],
        values[5] - values[6],
    )
    if min(estimates) < -tol or min(alpha_sq, beta_sq, gamma_sq) < -tol:
        raise InconsistentStructureError(
            f"negative squared amplitude beyond tolerance: {estimates}"
        )
    spread = max(estimates) - min(estimates)
    return StructuredAmplitudes(alpha_sq, beta_sq, gamma_sq, estimates, spread)


def bd_three_qubit(state: FermionState, tol: float = SYNTHETIC_PIN_TOL) -> np.ndarray:
    """Qubit amplitude tensor of a (3, 6) state on the symmetric-pair cube.

    The admissible determinants pick one orbital from each pair (k, 7-k);
    bit b_k = 0 selects orbital k, b_k = 1 selects 7-k.  The amplitude
    carries the sign reordering (i1, i2, i3) into increasing order.
    """
    if (state.n_particles, state.rank) != (3, 6):
        raise ValueError("three-qubit reduction applies to (3, 6) states")
    tensor = np.zeros((2, 2, 2), dtype=complex)
    support = {}
    for bits in np.ndindex(2, 2, 2):
        picks = tuple(pair[b] for pair, b in zip(BD_PAIRS, bits))
        inversions = sum(
            1 for a in range(3) for b in range(a + 1, 3) if picks[a] > picks[b]
        )
        sign = -1.0 if inversions % 2 else 1.0
        support[SlaterDet(sorted(picks))] = (bits, sign)
    for det, amp in state.amplitudes.items():
        if det not in support:
            if abs(amp) > tol:
                raise ValueError(
                    f"amplitude {abs(amp):.3g} on determinant {tuple(det)} "
                    "outside the symmetric-pair cube"
                )
            continue
        bits, sign = support[det]
        tensor[bits] = sign * amp
    return tensor
