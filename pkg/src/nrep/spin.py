"""Spin bookkeeping for the d-shell case studies.

Total spin S of an N-fermion state corresponds to a two-column Young
diagram with column lengths (N/2 + S, N/2 - S).  Spin natural occupation
numbers are normalized to trace 1; magnetic moments are weighted sums of
them with case-supplied weights (g = 2).  Measurement direction issues
(the moment axis need not coincide with the field axis) are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

from .data import D7_SPIN_WEIGHTS, IRON_SPIN_OCCUPATIONS

Scalar = Union[int, float, Fraction]

SPIN_SUM_TOL = 1e-10
SPIN_NEG_TOL = 1e-12
CUBIC_TOTAL_TOL = 1e-10

__all__ = [
    "YoungDiagramTwoCol",
    "SpinSpectrum",
    "CubicSplitting",
    "diagram_for",
    "moment",
    "cubic_occupations",
    "iron_spin_occupations",
]


@dataclass(frozen=True)
class YoungDiagramTwoCol:
    """Two-column Young diagram; spin is half the column-length difference."""

    c1: int
    c2: int

    def __post_init__(self) -> None:
        if not (isinstance(self.c1, int) and isinstance(self.c2, int)):
            raise TypeError("column lengths must be integers")
        if not self.c1 >= self.c2 >= 0:
            raise ValueError(f"need c1 >= c2 >= 0, got ({self.c1}, {self.c2})")

    @property
    def n_particles(self) -> int:
        return self.c1 + self.c2

    @property
    def spin(self) -> Fraction:
        return Fraction(self.c1 - self.c2, 2)

    def row_shape(self) -> tuple[int, ...]:
        return (2,) * self.c2 + (1,) * (self.c1 - self.c2)


@dataclass(frozen=True)
class SpinSpectrum:
    """Decreasing spin occupation numbers summing to 1."""

    values: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        vals = tuple(self.values)
        object.__setattr__(self, "values", vals)
        floats = [float(v) for v in vals]
        if any(a < b - SPIN_NEG_TOL for a, b in zip(floats, floats[1:])):
            raise ValueError(f"spin occupations not decreasing: {floats}")
        if floats and floats[-1] < -SPIN_NEG_TOL:
            raise ValueError(f"negative spin occupation: {floats[-1]}")
        if abs(sum(floats) - 1.0) > SPIN_SUM_TOL:
            raise ValueError(f"spin occupations sum to {sum(floats)}, expected 1")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class CubicSplitting:
    """Cubic-field d7 occupations: three t2g orbitals at n_t, two e_g at n_e."""

    n_t: Scalar
    n_e: Scalar
    spectrum: tuple[Scalar, ...] = field(default=())
    t_below_e: bool = False

    def __post_init__(self) -> None:
        if abs(3 * float(self.n_t) + 2 * float(self.n_e) - 7.0) > CUBIC_TOTAL_TOL:
            raise ValueError(f"3*{self.n_t} + 2*{self.n_e} != 7")
        for v in (self.n_t, self.n_e):
            if not -SPIN_NEG_TOL <= float(v) <= 2 + SPIN_NEG_TOL:
                raise ValueError(f"occupation {v} outside [0, 2]")


def diagram_for(n: int, s: Scalar) -> YoungDiagramTwoCol:
    """Diagram (N/2 + S, N/2 - S) for N particles with total spin S."""
    spin = Fraction(s)
    if spin < 0 or spin > Fraction(n, 2):
        raise ValueError(f"spin {spin} outside 0..{Fraction(n, 2)}")
    c1 = Fraction(n, 2) + spin
    if c1.denominator != 1:
        raise ValueError(f"N/2 + S = {c1} is not an integer")
    return YoungDiagramTwoCol(int(c1), n - int(c1))


def moment(spec: Union[SpinSpectrum, Sequence[Scalar]], weights: Sequence[Scalar]) -> Scalar:
    """Weighted sum of spin occupations; exact when inputs are rational."""
    values = tuple(spec.values if isinstance(spec, SpinSpectrum) else spec)
    if len(values) != len(weights):
        raise ValueError(f"{len(weights)} weights for {len(values)} occupations")
    total = sum(w * v for w, v in zip(weights, values))
    return Fraction(total) if isinstance(total, Rational) else total


def cubic_occupations(n_t: Scalar) -> CubicSplitting:
    """Orbital occupations (n_t, n_t, n_t, n_e, n_e) with 3n_t + 2n_e = 7.

    Exact in rational arithmetic for rational input.  The spectrum is
    sorted decreasing; t_below_e flags the n_t < n_e regime where the
    t2g values no longer lead.
    """
    if not 1 <= float(n_t) <= 2:
        raise ValueError(f"n_t = {n_t} outside the physical range [1, 2]")
    if isinstance(n_t, Rational):
        n_e: Scalar = Fraction(7 - 3 * Fraction(n_t), 2)
    else:
        n_e = (7.0 - 3.0 * n_t) / 2.0
    values = sorted((n_t, n_t, n_t, n_e, n_e), key=float, reverse=True)
    return CubicSplitting(n_t, n_e, tuple(values), t_below_e=float(n_t) < float(n_e))


def iron_spin_occupations() -> SpinSpectrum:
    """Tabulated iron d-shell spin occupations (0.69, 0.23, 0.08, 0)."""
    spec = SpinSpectrum(IRON_SPIN_OCCUPATIONS)
    mu = moment(spec, D7_SPIN_WEIGHTS)
    assert abs(float(mu) - 2.22) <= 0.005
    return spec
