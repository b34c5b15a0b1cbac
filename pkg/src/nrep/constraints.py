"""Generalized Pauli constraints on natural occupation spectra.

A constraint is an affine relation c . lambda <= b or c . lambda == b
with exact rational coefficients over the decreasingly sorted occupation
numbers.  `catalog` returns the known families per (N, r): Borland-Dennis
equalities for (3, 6), the rank-7 quadruple for (3, 7), symmetric
orbital-pair bounds and truncated series extensions for higher rank,
two-electron pair degeneracies, and hole-dual images of all of these.
Every catalog also carries the base rows (ordering, 0 <= lambda_i <= 1,
normalization), and a completeness flag that is metadata only: complete
exactly where a full set is established (two electrons, rank <= 7, and
hole duals of those).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .fock import MAX_RANK, FormatError

COMPLETE = "complete"
INCOMPLETE = "valid-but-possibly-incomplete"
SATURATION_TOL = 1e-6
DUAL_PREFIX = "dual:"

__all__ = [
    "COMPLETE",
    "INCOMPLETE",
    "SATURATION_TOL",
    "AffineConstraint",
    "ConstraintSet",
    "ConstraintStatus",
    "EvaluationReport",
    "catalog",
    "evaluate",
    "derive_pauli_from_quadruple",
    "dualize",
    "series_indices",
    "symmetric_pair_rows",
    "coefficient_arrays",
    "set_to_json",
    "set_from_json",
]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class AffineConstraint:
    """c . lambda <relation> bound with exact rational coefficients."""

    label: str
    coefficients: tuple[Fraction, ...]
    relation: str  # "<=" or "=="
    bound: Fraction
    provenance: str = ""

    def __post_init__(self) -> None:
        coeffs = tuple(_frac(c) for c in self.coefficients)
        if not any(coeffs):
            raise ValueError(f"constraint {self.label!r} has zero coefficients")
        if self.relation not in ("<=", "=="):
            raise ValueError(f"relation must be '<=' or '==', got {self.relation!r}")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "bound", _frac(self.bound))

    def value(self, values: Sequence[float]) -> float:
        return float(sum(float(c) * v for c, v in zip(self.coefficients, values)))

    def residual(self, values: Sequence[float]) -> float:
        return float(self.bound) - self.value(values)

    def pretty(self) -> str:
        terms = []
        for i, c in enumerate(self.coefficients, start=1):
            if c == 0:
                continue
            mag = abs(c)
            coeff = "" if mag == 1 else f"{mag}*"
            terms.append(("- " if c < 0 else "+ " if terms else "") + f"{coeff}l{i}")
        lhs = " ".join(terms)
        op = "<=" if self.relation == "<=" else "="
        return f"{lhs} {op} {self.bound}"


@dataclass(frozen=True)
class ConstraintSet:
    """Constraints for one (N, r) system plus a completeness flag."""

    n_particles: int
    rank: int
    constraints: tuple[AffineConstraint, ...]
    completeness: str

    def __post_init__(self) -> None:
        if self.completeness not in (COMPLETE, INCOMPLETE):
            raise ValueError(f"bad completeness flag {self.completeness!r}")
        object.__setattr__(self, "constraints", tuple(self.constraints))
        labels = [c.label for c in self.constraints]
        if len(set(labels)) != len(labels):
            raise ValueError("constraint labels must be unique within a set")
        for c in self.constraints:
            if len(c.coefficients) != self.rank:
                raise ValueError(
                    f"constraint {c.label!r} has {len(c.coefficients)} coefficients, "
                    f"expected {self.rank}"
                )

    def get(self, label: str) -> AffineConstraint:
        for c in self.constraints:
            if c.label == label:
                return c
        raise KeyError(label)


@dataclass(frozen=True)
class ConstraintStatus:
    label: str
    value: float
    residual: float
    status: str  # "satisfied" | "saturated" | "violated"


@dataclass(frozen=True)
class EvaluationReport:
    entries: tuple[ConstraintStatus, ...]
    tol: float

    def ok(self) -> bool:
        return not self.violated()

    def violated(self) -> tuple[ConstraintStatus, ...]:
        return tuple(e for e in self.entries if e.status == "violated")

    def saturated(self) -> tuple[ConstraintStatus, ...]:
        return tuple(e for e in self.entries if e.status == "saturated")

    def by_label(self, label: str) -> ConstraintStatus:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)


def _unit(r: int, i: int, coeff: int | Fraction = 1) -> list[Fraction]:
    row = [Fraction(0)] * r
    row[i - 1] = _frac(coeff)
    return row


def _support_row(r: int, indices: Iterable[int]) -> tuple[Fraction, ...]:
    row = [Fraction(0)] * r
    for i in indices:
        row[i - 1] = Fraction(1)
    return tuple(row)


def base_constraints(n: int, r: int) -> list[AffineConstraint]:
    rows = [
        AffineConstraint(
            "norm", tuple(Fraction(1) for _ in range(r)), "==", Fraction(n), "normalization"
        )
    ]
    for i in range(1, r):
        coeffs = [Fraction(0)] * r
        coeffs[i - 1] = Fraction(-1)
        coeffs[i] = Fraction(1)
        rows.append(
            AffineConstraint(f"ord_{i}", tuple(coeffs), "<=", Fraction(0), "ordering")
        )
    for i in range(1, r + 1):
        rows.append(
            AffineConstraint(
                f"high_{i}", tuple(_unit(r, i)), "<=", Fraction(1), "pauli bound"
            )
        )
        rows.append(
            AffineConstraint(
                f"low_{i}", tuple(_unit(r, i, -1)), "<=", Fraction(0), "pauli bound"
            )
        )
    return rows


def _pair_degeneracy_rows(r: int) -> list[AffineConstraint]:
    rows = []
    for k in range(1, r // 2 + 1):
        coeffs = [Fraction(0)] * r
        coeffs[2 * k - 2] = Fraction(1)
        coeffs[2 * k - 1] = Fraction(-1)
        rows.append(
            AffineConstraint(
                f"pair_{k}", tuple(coeffs), "==", Fraction(0), "two-electron pairing"
            )
        )
    if r % 2 == 1:
        rows.append(
            AffineConstraint(
                "tail_zero", tuple(_unit(r, r)), "==", Fraction(0), "two-electron pairing"
            )
        )
    return rows


def _borland_dennis_rows() -> list[AffineConstraint]:
    r = 6
    rows = []
    for k, (i, j) in enumerate(((1, 6), (2, 5), (3, 4)), start=1):
        rows.append(
            AffineConstraint(
                f"bd_eq_{k}", _support_row(r, (i, j)), "==", Fraction(1), "borland-dennis"
            )
        )
    coeffs = [Fraction(0)] * r
    coeffs[3], coeffs[4], coeffs[5] = Fraction(1), Fraction(-1), Fraction(-1)
    rows.append(
        AffineConstraint("bd_ineq", tuple(coeffs), "<=", Fraction(0), "borland-dennis")
    )
    return rows


QUADRUPLE_SUPPORTS = ((2, 3, 4, 5), (1, 3, 4, 6), (1, 2, 5, 6), (1, 2, 4, 7))


def _quadruple_rows() -> list[AffineConstraint]:
    return [
        AffineConstraint(
            f"quad_{k}", _support_row(7, sup), "<=", Fraction(2), "rank-7 quadruple"
        )
        for k, sup in enumerate(QUADRUPLE_SUPPORTS, start=1)
    ]


def symmetric_pair_rows(r: int) -> list[AffineConstraint]:
    """lambda_{k+1} + lambda_{r-k} <= 1 for k+1 < r-k (even rank family)."""
    rows = []
    k = 0
    while k + 1 < r - k:
        rows.append(
            AffineConstraint(
                f"sym_{k + 1}_{r - k}",
                _support_row(r, (k + 1, r - k)),
                "<=",
                Fraction(1),
                "symmetric orbital pair",
            )
        )
        k += 1
    return rows


def series_indices(r: int) -> tuple[int, ...]:
    """1, 2, 4, 7, 11, 16, ... (successive gaps 1, 2, 3, ...) while <= r."""
    out = []
    idx, gap = 1, 1
    while idx <= r:
        out.append(idx)
        idx += gap
        gap += 1
    return tuple(out)


def _series_rows(r: int) -> list[AffineConstraint]:
    tail = tuple(i for i in series_indices(r) if i >= 11)
    rows = []
    for k, sup in enumerate(QUADRUPLE_SUPPORTS, start=1):
        rows.append(
            AffineConstraint(
                f"series_{k}",
                _support_row(r, tuple(sup) + tail),
                "<=",
                Fraction(2),
                "series extension",
            )
        )
    return rows


def catalog(n: int, r: int) -> ConstraintSet:
    """Known constraints for (n, r); base rows always included."""
    if not (1 <= n <= r <= MAX_RANK):
        raise ValueError(f"need 1 <= n <= r <= {MAX_RANK}, got n={n}, r={r}")
    base = base_constraints(n, r)
    if n == 2:
        return ConstraintSet(n, r, tuple(base + _pair_degeneracy_rows(r)), COMPLETE)
    if n == 3 and r == 6:
        return ConstraintSet(n, r, tuple(base + _borland_dennis_rows()), COMPLETE)
    if n == 3 and r == 7:
        return ConstraintSet(n, r, tuple(base + _quadruple_rows()), COMPLETE)
    if n == 3 and r >= 8:
        extra = _series_rows(r)
        if r % 2 == 0:
            extra = symmetric_pair_rows(r) + extra
        return ConstraintSet(n, r, tuple(base + extra), INCOMPLETE)
    if n == r - 2 and r >= 4:
        return dualize(catalog(2, r), r)
    if n == r - 3 and r >= 7:
        return dualize(catalog(3, r), r)
    return ConstraintSet(n, r, tuple(base), INCOMPLETE)


def _spectrum_values(spec) -> Sequence[float]:
    return spec.values if hasattr(spec, "values") else tuple(float(v) for v in spec)


def evaluate(cset: ConstraintSet, spec, tol: float = SATURATION_TOL) -> EvaluationReport:
    """Residuals and statuses of every constraint on a spectrum."""
    values = _spectrum_values(spec)
    if len(values) != cset.rank:
        raise ValueError(f"spectrum has {len(values)} values, set expects {cset.rank}")
    entries = []
    for c in cset.constraints:
        val = c.value(values)
        res = c.residual(values)
        if c.relation == "==":
            status = "saturated" if abs(res) <= tol else "violated"
        elif res < -tol:
            status = "violated"
        elif abs(res) <= tol:
            status = "saturated"
        else:
            status = "satisfied"
        entries.append(ConstraintStatus(c.label, val, res, status))
    return EvaluationReport(tuple(entries), tol)


def derive_pauli_from_quadruple() -> AffineConstraint:
    """Combine the second and third quadruple rows with normalization.

    Adding quad_2 and quad_3 and subtracting sum(lambda) = 3 leaves
    lambda_1 + lambda_6 - lambda_7 <= 1, an exact rational consequence.
    """
    cset = catalog(3, 7)
    q2, q3 = cset.get("quad_2"), cset.get("quad_3")
    norm = cset.get("norm")
    coeffs = tuple(
        a + b - c for a, b, c in zip(q2.coefficients, q3.coefficients, norm.coefficients)
    )
    bound = q2.bound + q3.bound - norm.bound
    return AffineConstraint(
        "pauli_from_quadruple", coeffs, "<=", bound, "rank-7 quadruple"
    )


def _dual_constraint(c: AffineConstraint, r: int) -> AffineConstraint:
    coeffs = tuple(-c.coefficients[r - j] for j in range(1, r + 1))
    bound = c.bound - sum(c.coefficients)
    label = (
        c.label[len(DUAL_PREFIX) :]
        if c.label.startswith(DUAL_PREFIX)
        else DUAL_PREFIX + c.label
    )
    return AffineConstraint(label, coeffs, c.relation, bound, c.provenance)


def dualize(cset: ConstraintSet, r: int) -> ConstraintSet:
    """Substitute lambda_k -> 1 - lambda_{r+1-k}; maps (n, r) to (r-n, r).

    An exact involution: applying twice returns the original set,
    coefficients and bounds included.
    """
    if r != cset.rank:
        raise ValueError(f"rank mismatch: set has {cset.rank}, got {r}")
    rows = tuple(_dual_constraint(c, r) for c in cset.constraints)
    return ConstraintSet(r - cset.n_particles, r, rows, cset.completeness)


def coefficient_arrays(cset: ConstraintSet):
    """Float (A, b, relations, labels) for vectorized batch evaluation."""
    import numpy as np

    a = np.array([[float(c) for c in row.coefficients] for row in cset.constraints])
    b = np.array([float(row.bound) for row in cset.constraints])
    relations = tuple(row.relation for row in cset.constraints)
    labels = tuple(row.label for row in cset.constraints)
    return a, b, relations, labels


def set_to_json(cset: ConstraintSet) -> str:
    return json.dumps(
        {
            "n": cset.n_particles,
            "r": cset.rank,
            "completeness": cset.completeness,
            "constraints": [
                {
                    "label": c.label,
                    "coefficients": [str(x) for x in c.coefficients],
                    "relation": c.relation,
                    "bound": str(c.bound),
                    "provenance": c.provenance,
                }
                for c in cset.constraints
            ],
        },
        sort_keys=True,
    )


def set_from_json(text: str) -> ConstraintSet:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    try:
        rows = tuple(
            AffineConstraint(
                rec["label"],
                tuple(Fraction(x) for x in rec["coefficients"]),
                rec["relation"],
                Fraction(rec["bound"]),
                rec.get("provenance", ""),
            )
            for rec in obj["constraints"]
        )
        return ConstraintSet(int(obj["n"]), int(obj["r"]), rows, obj["completeness"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad constraint set document: {exc}") from exc
