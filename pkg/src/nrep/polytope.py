"""Exact-rational halfspace systems and 2D projections of occupation polytopes.

Projection works by Fourier-Motzkin elimination over Fractions: equalities
are used for substitution first, then one variable is eliminated per step
by combining opposing inequality pairs, with dominance pruning between
steps to control row growth.  Floating point enters only at emission;
elimination amplifies rounding error too badly to do otherwise.

The d-shell instances cover the two case studies: the low-spin d3 system
(five orbital occupations plus the moment) and the two printed d7 boundary
edges with their vertices.  The full d7 pentagon is not modeled; its
55-inequality source system is out of scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, hypot
from typing import Mapping, Sequence, Union

from .constraints import ConstraintSet
from .data import (
    D7_SPIN_WEIGHTS,
    PULLBACK_A_ORBITAL,
    PULLBACK_A_SPIN,
    PULLBACK_B_ORBITAL,
    PULLBACK_B_SPIN,
)
from .fock import FormatError
from .spin import moment

Rat = Union[int, str, Fraction]
Row = tuple[tuple[Fraction, ...], Fraction]

__all__ = [
    "HalfspaceSystem",
    "Polygon2D",
    "DShellEdges",
    "PointClassification",
    "UnboundedProjectionError",
    "project_2d",
    "feasible_point",
    "lift_vertex",
    "halfspaces_from_constraints",
    "dshell_low_spin_system",
    "dshell_d7_edges",
    "classify_point",
    "emit_polygon",
    "system_to_json",
    "system_from_json",
]


class UnboundedProjectionError(ValueError):
    """The system is feasible but its 2D image extends to infinity."""


def _rat(value: Rat) -> Fraction:
    if isinstance(value, float):
        raise TypeError(f"rational coefficient required, got float {value!r}")
    return Fraction(value)


def _coerce_rows(rows, width: int) -> tuple[Row, ...]:
    out = []
    for coeffs, bound in rows:
        vec = tuple(_rat(c) for c in coeffs)
        if len(vec) != width:
            raise ValueError(f"row has {len(vec)} coefficients, expected {width}")
        out.append((vec, _rat(bound)))
    return tuple(out)


@dataclass(frozen=True)
class HalfspaceSystem:
    """Rational rows a.x <= b and a.x = b over named variables."""

    variables: tuple[str, ...]
    inequalities: tuple[Row, ...]
    equalities: tuple[Row, ...] = ()

    def __post_init__(self) -> None:
        names = tuple(self.variables)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        object.__setattr__(self, "variables", names)
        object.__setattr__(self, "inequalities", _coerce_rows(self.inequalities, len(names)))
        object.__setattr__(self, "equalities", _coerce_rows(self.equalities, len(names)))

    def extended(self, inequalities=(), equalities=()) -> "HalfspaceSystem":
        return HalfspaceSystem(
            self.variables,
            self.inequalities + _coerce_rows(inequalities, len(self.variables)),
            self.equalities + _coerce_rows(equalities, len(self.variables)),
        )

    def contains_point(self, values: Sequence, tol: float = 0.0) -> bool:
        if len(values) != len(self.variables):
            raise ValueError("point dimension mismatch")
        if tol == 0.0 and all(not isinstance(v, float) for v in values):
            vals = [Fraction(v) for v in values]
            return all(
                sum(a * v for a, v in zip(coeffs, vals)) <= b
                for coeffs, b in self.inequalities
            ) and all(
                sum(a * v for a, v in zip(coeffs, vals)) == b
                for coeffs, b in self.equalities
            )
        vals = [float(v) for v in values]
        for coeffs, b in self.inequalities:
            if sum(float(a) * v for a, v in zip(coeffs, vals)) > float(b) + tol:
                return False
        for coeffs, b in self.equalities:
            if abs(sum(float(a) * v for a, v in zip(coeffs, vals)) - float(b)) > tol:
                return False
        return True


@dataclass(frozen=True)
class Polygon2D:
    """Convex vertex ring, counterclockwise, no collinear triples."""

    vertices: tuple[tuple[Fraction, Fraction], ...]
    empty: bool = False
    degenerate: bool = False

    def area(self) -> Fraction:
        if len(self.vertices) < 3:
            return Fraction(0)
        total = Fraction(0)
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:] + self.vertices[:1]):
            total += x1 * y2 - x2 * y1
        return total / 2

    def contains(self, point: Sequence, tol: float = 0.0) -> bool:
        if self.empty or not self.vertices:
            return False
        px, py = float(point[0]), float(point[1])
        if len(self.vertices) == 1:
            vx, vy = self.vertices[0]
            return hypot(px - float(vx), py - float(vy)) <= tol
        if len(self.vertices) == 2:
            return _segment_distance(px, py, self.vertices[0], self.vertices[1]) <= tol
        for (x1, y1), (x2, y2) in zip(self.vertices, self.vertices[1:] + self.vertices[:1]):
            ex, ey = float(x2) - float(x1), float(y2) - float(y1)
            cross = ex * (py - float(y1)) - ey * (px - float(x1))
            if cross < -tol * hypot(ex, ey):
                return False
        return True


def _segment_distance(px: float, py: float, a, b) -> float:
    ax, ay, bx, by = float(a[0]), float(a[1]), float(b[0]), float(b[1])
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    t = 0.0 if length_sq == 0 else max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / length_sq))
    return hypot(px - (ax + t * dx), py - (ay + t * dy))


# --- elimination core -------------------------------------------------------

def _normalize(coeffs: Sequence[Fraction], bound: Fraction):
    """Scale to a primitive integer direction; None direction if all zero."""
    scale = 1
    for c in coeffs:
        scale = scale * c.denominator // gcd(scale, c.denominator)
    ints = [int(c * scale) for c in coeffs]
    common = 0
    for v in ints:
        common = gcd(common, abs(v))
    if common == 0:
        return None, bound
    return tuple(v // common for v in ints), bound * scale / common


def _prune(rows: list[Row]) -> tuple[list[Row], bool]:
    """Drop tautologies and dominated parallels; report contradictions."""
    best: dict[tuple[int, ...], Fraction] = {}
    for coeffs, bound in rows:
        direction, scaled = _normalize(coeffs, bound)
        if direction is None:
            if scaled < 0:
                return [], True
            continue
        if direction not in best or scaled < best[direction]:
            best[direction] = scaled
    out = [(tuple(Fraction(v) for v in direction), bound) for direction, bound in best.items()]
    return out, False


def _fm_step(rows: list[Row], j: int) -> list[Row]:
    uppers, lowers, rest = [], [], []
    for coeffs, bound in rows:
        cj = coeffs[j]
        if cj > 0:
            uppers.append((coeffs, bound))
        elif cj < 0:
            lowers.append((coeffs, bound))
        else:
            rest.append((coeffs, bound))
    for lc, lb in lowers:
        for uc, ub in uppers:
            scale_l, scale_u = uc[j], -lc[j]
            coeffs = tuple(scale_l * a + scale_u * b for a, b in zip(lc, uc))
            rest.append((coeffs, scale_l * lb + scale_u * ub))
    return rest


def _substitute_equalities(eqs: list[Row], ineqs: list[Row], keep: frozenset[int]):
    """Pivot each equality on a non-kept variable and substitute it away.

    Returns (pivot expressions in order, equalities left on kept variables
    only, substituted inequalities, feasible flag).
    """
    exprs: list[tuple[int, tuple[Fraction, ...], Fraction]] = []
    keep_eqs: list[Row] = []
    pending = list(eqs)
    while pending:
        coeffs, bound = pending.pop(0)
        pivot = next((j for j, c in enumerate(coeffs) if c != 0 and j not in keep), None)
        if pivot is None:
            if any(c != 0 for c in coeffs):
                keep_eqs.append((coeffs, bound))
            elif bound != 0:
                return exprs, keep_eqs, ineqs, False
            continue
        exprs.append((pivot, coeffs, bound))

        def subst(row: Row) -> Row:
            rc, rb = row
            factor = rc[pivot] / coeffs[pivot]
            if factor == 0:
                return row
            new = tuple(a - factor * b for a, b in zip(rc, coeffs))
            return new, rb - factor * bound

        pending = [subst(r) for r in pending]
        keep_eqs = [subst(r) for r in keep_eqs]
        ineqs = [subst(r) for r in ineqs]
    return exprs, keep_eqs, ineqs, True


def _eliminate_all(rows: list[Row], targets: list[int]) -> tuple[list[Row], bool]:
    """FM-eliminate every target variable; returns (rows, feasible)."""
    remaining = list(targets)
    while remaining:
        def cost(j: int) -> int:
            pos = sum(1 for c, _ in rows if c[j] > 0)
            neg = sum(1 for c, _ in rows if c[j] < 0)
            return pos * neg
        j = min(remaining, key=cost)
        remaining.remove(j)
        rows = _fm_step(rows, j)
        rows, contradiction = _prune(rows)
        if contradiction:
            return [], False
    return rows, True


def _functional(sys: HalfspaceSystem, f) -> tuple[Fraction, ...]:
    if isinstance(f, str):
        if f not in sys.variables:
            raise ValueError(f"unknown variable {f!r}")
        return tuple(Fraction(int(name == f)) for name in sys.variables)
    if isinstance(f, Mapping):
        unknown = set(f) - set(sys.variables)
        if unknown:
            raise ValueError(f"unknown variables {sorted(unknown)}")
        return tuple(_rat(f.get(name, 0)) for name in sys.variables)
    vec = tuple(_rat(c) for c in f)
    if len(vec) != len(sys.variables):
        raise ValueError("functional length mismatch")
    return vec


def project_2d(sys: HalfspaceSystem, x, y) -> Polygon2D:
    """Polygon of {(x.v, y.v) : v feasible}; exact until the hull is built."""
    fx, fy = _functional(sys, x), _functional(sys, y)
    d = len(sys.variables)
    zero2 = (Fraction(0), Fraction(0))
    eqs = [(coeffs + zero2, b) for coeffs, b in sys.equalities]
    eqs.append((tuple(-c for c in fx) + (Fraction(1), Fraction(0)), Fraction(0)))
    eqs.append((tuple(-c for c in fy) + (Fraction(0), Fraction(1)), Fraction(0)))
    ineqs = [(coeffs + zero2, b) for coeffs, b in sys.inequalities]
    keep = frozenset({d, d + 1})

    exprs, keep_eqs, ineqs, feasible = _substitute_equalities(eqs, ineqs, keep)
    if not feasible:
        return Polygon2D((), empty=True)
    rows, feasible = _eliminate_all(ineqs, list(range(d)))
    if not feasible:
        return Polygon2D((), empty=True)

    ineq2 = [((c[d], c[d + 1]), b) for c, b in rows]
    eq2 = [((c[d], c[d + 1]), b) for c, b in keep_eqs]
    return _polygon_from_2d(ineq2, eq2)


def _polygon_from_2d(ineq2: list[Row], eq2: list[Row]) -> Polygon2D:
    rows = list(ineq2)
    for coeffs, b in eq2:
        rows.append((coeffs, b))
        rows.append((tuple(-c for c in coeffs), -b))
    rows, contradiction = _prune(rows)
    if contradiction:
        return Polygon2D((), empty=True)

    check, feasible = _eliminate_all(list(rows), [0, 1])
    del check
    if not feasible:
        return Polygon2D((), empty=True)

    directions = [c for c, _ in rows]
    candidates = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)),
                  (Fraction(-1), Fraction(0)), (Fraction(0), Fraction(-1))]
    for a1, a2 in directions:
        candidates.extend([(-a2, a1), (a2, -a1), (-a1, -a2)])
    for direction in candidates:
        if direction == (0, 0):
            continue
        if all(a1 * direction[0] + a2 * direction[1] <= 0 for (a1, a2), _ in rows):
            raise UnboundedProjectionError(f"image unbounded along direction {direction}")

    points: set[tuple[Fraction, Fraction]] = set()
    lines = rows
    for i in range(len(lines)):
        (a1, a2), b1 = lines[i]
        for k in range(i + 1, len(lines)):
            (c1, c2), b2 = lines[k]
            det = a1 * c2 - a2 * c1
            if det == 0:
                continue
            px = (b1 * c2 - b2 * a2) / det
            py = (a1 * b2 - c1 * b1) / det
            if all(u * px + v * py <= b for (u, v), b in rows):
                points.add((px, py))
    if not points:
        raise RuntimeError("feasible bounded region produced no vertices")
    return _hull(sorted(points))


def _hull(points: list[tuple[Fraction, Fraction]]) -> Polygon2D:
    if len(points) == 1:
        return Polygon2D((points[0],), degenerate=True)

    def cross(o, a, b) -> Fraction:
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in points:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(points):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    ring = lower[:-1] + upper[:-1]
    if len(ring) < 3:
        ends = (points[0], points[-1])
        return Polygon2D(ends, degenerate=True)
    start = ring.index(min(ring))
    return Polygon2D(tuple(ring[start:] + ring[:start]))


def feasible_point(sys: HalfspaceSystem):
    """An exact rational feasible point, or None; found by elimination
    with interval back-substitution (midpoints of the residual ranges)."""
    d = len(sys.variables)
    exprs, keep_eqs, ineqs, feasible = _substitute_equalities(
        list(sys.equalities), list(sys.inequalities), frozenset()
    )
    assert not keep_eqs
    if not feasible:
        return None
    pivoted = {j for j, _, _ in exprs}
    tape: list[tuple[int, list[Row]]] = []
    rows, contradiction = _prune(ineqs)
    if contradiction:
        return None
    remaining = [j for j in range(d) if j not in pivoted]
    while remaining:
        j = min(remaining, key=lambda k: sum(1 for c, _ in rows if c[k] > 0)
                * max(1, sum(1 for c, _ in rows if c[k] < 0)))
        remaining.remove(j)
        tape.append((j, [r for r in rows if r[0][j] != 0]))
        rows = _fm_step(rows, j)
        rows, contradiction = _prune(rows)
        if contradiction:
            return None
    for coeffs, b in rows:
        if b < 0:
            return None

    values: dict[int, Fraction] = {}
    for j, bounding in reversed(tape):
        lo, hi = None, None
        for coeffs, b in bounding:
            rest = b - sum(c * values[k] for k, c in enumerate(coeffs) if k != j and c != 0)
            limit = rest / coeffs[j]
            if coeffs[j] > 0:
                hi = limit if hi is None else min(hi, limit)
            else:
                lo = limit if lo is None else max(lo, limit)
        if lo is not None and hi is not None:
            values[j] = (lo + hi) / 2
        elif lo is not None:
            values[j] = lo
        elif hi is not None:
            values[j] = hi
        else:
            values[j] = Fraction(0)
    for j, coeffs, b in reversed(exprs):
        rest = b - sum(c * values[k] for k, c in enumerate(coeffs) if k != j and c != 0)
        values[j] = rest / coeffs[j]
    return {name: values.get(i, Fraction(0)) for i, name in enumerate(sys.variables)}


def lift_vertex(sys: HalfspaceSystem, x, y, vertex):
    """Rational preimage of a projected vertex, or None if it has none."""
    fx, fy = _functional(sys, x), _functional(sys, y)
    pinned = sys.extended(equalities=[(fx, _rat(vertex[0])), (fy, _rat(vertex[1]))])
    return feasible_point(pinned)


def halfspaces_from_constraints(cset: ConstraintSet) -> HalfspaceSystem:
    """Occupation-spectrum constraint set as a system over l1..lr."""
    names = tuple(f"l{i}" for i in range(1, cset.rank + 1))
    ineqs, eqs = [], []
    for c in cset.constraints:
        row = (tuple(c.coefficients), c.bound)
        (eqs if c.relation == "==" else ineqs).append(row)
    return HalfspaceSystem(names, ineqs, eqs)


# --- d-shell instances ------------------------------------------------------

def dshell_low_spin_system() -> HalfspaceSystem:
    """Low-spin d3 constraints on (l1..l5, mu), moment normalized to [0, 1]."""
    F = Fraction
    half = F(1, 2)
    ineqs = [
        ((F(1), F(0), F(0), half, half, F(0)), F(2)),      # l1 + (l4+l5)/2 <= 2
        ((F(2), F(-2), F(0), F(0), F(0), F(1)), F(3)),     # mu <= 3 - 2(l1-l2)
        ((F(0), F(2), F(-2), F(0), F(0), F(1)), F(3)),     # mu <= 3 - 2(l2-l3)
        ((F(2), F(0), F(-2), F(0), F(0), F(-1)), F(3)),    # mu >= 2(l1-l3) - 3
        ((F(4), F(-2), F(0), F(2), F(0), F(-1)), F(7)),    # mu >= 4l1 - 2l2 + 2l4 - 7
        ((F(-1), F(1), F(0), F(0), F(0), F(0)), F(0)),
        ((F(0), F(-1), F(1), F(0), F(0), F(0)), F(0)),
        ((F(0), F(0), F(-1), F(1), F(0), F(0)), F(0)),
        ((F(0), F(0), F(0), F(-1), F(1), F(0)), F(0)),
        ((F(0), F(0), F(0), F(0), F(-1), F(0)), F(0)),
        ((F(1), F(0), F(0), F(0), F(0), F(0)), F(2)),      # sharpened Pauli bound
        ((F(0), F(0), F(0), F(0), F(0), F(1)), F(1)),
        ((F(0), F(0), F(0), F(0), F(0), F(-1)), F(0)),
    ]
    eqs = [((F(1), F(1), F(1), F(1), F(1), F(0)), F(3))]
    return HalfspaceSystem(("l1", "l2", "l3", "l4", "l5", "mu"), ineqs, eqs)


@dataclass(frozen=True)
class DShellEdges:
    """Boundary lines mu = 7 n_t - 8 and mu = 16 - 9 n_t with vertices A, B."""

    ab_line: tuple[Fraction, Fraction]
    upper_line: tuple[Fraction, Fraction]
    vertex_a: tuple[Fraction, Fraction]
    vertex_b: tuple[Fraction, Fraction]

    def __post_init__(self) -> None:
        slope, intercept = self.ab_line
        ax, ay = self.vertex_a
        if slope * ax + intercept != ay:
            raise ValueError("vertex A is off the lower edge line")
        bx, by = self.vertex_b
        for s, c in (self.ab_line, self.upper_line):
            if s * bx + c != by:
                raise ValueError("vertex B must lie on both edge lines")


def dshell_d7_edges() -> DShellEdges:
    """Edge lines with A, B recomputed from the tabulated vertex pullbacks."""
    a = (PULLBACK_A_ORBITAL[0], moment(PULLBACK_A_SPIN, D7_SPIN_WEIGHTS))
    b = (PULLBACK_B_ORBITAL[0], moment(PULLBACK_B_SPIN, D7_SPIN_WEIGHTS))
    return DShellEdges(
        ab_line=(Fraction(7), Fraction(-8)),
        upper_line=(Fraction(-9), Fraction(16)),
        vertex_a=a,
        vertex_b=b,
    )


@dataclass(frozen=True)
class PointClassification:
    point: tuple[float, float]
    residual_ab: float        # mu - (7 n_t - 8)
    residual_upper: float     # mu - (16 - 9 n_t)
    below_ab: bool
    below_upper: bool
    pinned_to_ab: bool


def classify_point(point, edges: DShellEdges, tol: float) -> PointClassification:
    """Residuals against both edge lines; pinned-to-AB within the segment."""
    nt, mu = float(point[0]), float(point[1])
    res_ab = mu - (float(edges.ab_line[0]) * nt + float(edges.ab_line[1]))
    res_up = mu - (float(edges.upper_line[0]) * nt + float(edges.upper_line[1]))
    ax, bx = float(edges.vertex_a[0]), float(edges.vertex_b[0])
    pinned = abs(res_ab) <= tol and min(ax, bx) <= nt <= max(ax, bx)
    return PointClassification(
        point=(nt, mu),
        residual_ab=res_ab,
        residual_upper=res_up,
        below_ab=res_ab <= tol,
        below_upper=res_up <= tol,
        pinned_to_ab=pinned,
    )


# --- emission and JSON ------------------------------------------------------

def _fmt(value) -> str:
    return f"{float(value):.12g}"


def emit_polygon(poly: Polygon2D, format: str) -> bytes:
    """Vertex list as csv (ring closed by repeating the first row) or json."""
    if poly.empty or not poly.vertices:
        raise ValueError("cannot emit an empty polygon")
    if format == "csv":
        ring = list(poly.vertices) + [poly.vertices[0]]
        lines = [f"{_fmt(x)},{_fmt(y)}" for x, y in ring]
        return ("\n".join(lines) + "\n").encode()
    if format == "json":
        pairs = [[float(_fmt(x)), float(_fmt(y))] for x, y in poly.vertices]
        return json.dumps(pairs).encode()
    raise ValueError(f"unknown polygon format {format!r}")


def system_to_json(sys: HalfspaceSystem) -> str:
    def rows(rs):
        return [{"coefficients": [str(c) for c in coeffs], "bound": str(b)}
                for coeffs, b in rs]
    return json.dumps({
        "variables": list(sys.variables),
        "inequalities": rows(sys.inequalities),
        "equalities": rows(sys.equalities),
    }, indent=2)


def system_from_json(text: str) -> HalfspaceSystem:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise FormatError("halfspace payload must be an object")
    try:
        variables = tuple(str(v) for v in payload["variables"])
        def rows(key):
            return [(tuple(Fraction(str(c)) for c in row["coefficients"]),
                     Fraction(str(row["bound"])))
                    for row in payload.get(key, [])]
        return HalfspaceSystem(variables, rows("inequalities"), rows("equalities"))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"malformed halfspace system: {exc}") from exc
