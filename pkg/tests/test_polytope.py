"""Exact rational projection: hulls, lifts, d-shell instances, formats."""

import sys as _sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

_sys.path.insert(0, str(Path(__file__).parent))
from gridscan import scan_system  # noqa: E402

from nrep.constraints import catalog
from nrep.fock import FormatError
from nrep.polytope import (
    DShellEdges,
    HalfspaceSystem,
    Polygon2D,
    UnboundedProjectionError,
    classify_point,
    dshell_d7_edges,
    dshell_low_spin_system,
    emit_polygon,
    feasible_point,
    halfspaces_from_constraints,
    lift_vertex,
    project_2d,
    system_from_json,
    system_to_json,
)
from nrep.rdm import sample_spectra

F = Fraction


def unit_cube(cap=None):
    ineqs = []
    for i in range(3):
        up = [0, 0, 0]
        up[i] = 1
        dn = [0, 0, 0]
        dn[i] = -1
        ineqs.append((tuple(up), 1))
        ineqs.append((tuple(dn), 0))
    if cap is not None:
        ineqs.append(((1, 1, 1), cap))
    return HalfspaceSystem(("x", "y", "z"), ineqs)


def test_cube_projects_to_unit_square():
    poly = project_2d(unit_cube(), "x", "y")
    assert not poly.empty and not poly.degenerate
    assert poly.vertices == ((F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1)))
    assert poly.area() == 1


def test_simplex_projects_to_triangle():
    simplex = HalfspaceSystem(
        ("x", "y", "z"),
        [((1, 1, 1), 1), (("-1", 0, 0), 0), ((0, "-1", 0), 0), ((0, 0, "-1"), 0)],
    )
    poly = project_2d(simplex, "x", "y")
    assert poly.vertices == ((F(0), F(0)), (F(1), F(0)), (F(0), F(1)))
    assert poly.area() == F(1, 2)


def test_functional_axes():
    simplex = HalfspaceSystem(
        ("x", "y", "z"),
        [((1, 1, 1), 1), (("-1", 0, 0), 0), ((0, "-1", 0), 0), ((0, 0, "-1"), 0)],
    )
    # project onto (x, y + z): same triangle through a non-coordinate axis
    poly = project_2d(simplex, "x", {"y": 1, "z": 1})
    assert poly.vertices == ((F(0), F(0)), (F(1), F(0)), (F(0), F(1)))
    with pytest.raises(ValueError):
        project_2d(simplex, "x", "w")
    with pytest.raises(ValueError):
        project_2d(simplex, "x", {"w": 1})


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        HalfspaceSystem(("x",), [((0.5,), 1)])
    with pytest.raises(TypeError):
        HalfspaceSystem(("x",), [((1,), 0.5)])


def test_equality_substitution_projection():
    tri = HalfspaceSystem(
        ("x", "y", "z"),
        [(("-1", 0, 0), 0), ((0, "-1", 0), 0), ((0, 0, "-1"), 0)],
        [((1, 1, 1), 1)],
    )
    poly = project_2d(tri, "x", "y")
    assert poly.vertices == ((F(0), F(0)), (F(1), F(0)), (F(0), F(1)))


def test_infeasible_system_is_empty():
    bad = HalfspaceSystem(("x", "y"), [((1, 0), 0), (("-1", 0), -1), ((0, 1), 1), ((0, "-1"), 0)])
    poly = project_2d(bad, "x", "y")
    assert poly.empty
    assert not poly.contains((0.0, 0.0))
    assert feasible_point(bad) is None


def test_unbounded_projection_raises():
    wedge = HalfspaceSystem(("x", "y"), [(("-1", 0), 0), ((0, "-1"), 0)])
    with pytest.raises(UnboundedProjectionError):
        project_2d(wedge, "x", "y")
    # bounded in one axis only is still unbounded as a polygon
    slab = HalfspaceSystem(("x", "y"), [((1, 0), 1), (("-1", 0), 0)])
    with pytest.raises(UnboundedProjectionError):
        project_2d(slab, "x", "y")


def test_degenerate_projections():
    diag = HalfspaceSystem(
        ("x", "y"),
        [((1, 0), 1), (("-1", 0), 0)],
        [((1, "-1"), 0)],
    )
    poly = project_2d(diag, "x", "y")
    assert poly.degenerate
    assert set(poly.vertices) == {(F(0), F(0)), (F(1), F(1))}
    assert poly.area() == 0
    assert poly.contains((0.5, 0.5), tol=1e-12)
    assert not poly.contains((0.5, 0.6), tol=1e-3)

    point = HalfspaceSystem(
        ("x", "y"), [], [((1, 0), "1/3"), ((0, 1), "2/3")]
    )
    poly = project_2d(point, "x", "y")
    assert poly.degenerate
    assert poly.vertices == ((F(1, 3), F(2, 3)),)
    assert poly.contains((1 / 3, 2 / 3), tol=1e-9)


def test_scan_agreement_small_systems():
    # fibers of these systems always contain a grid witness, so the scan
    # equals the polygon restricted to the grid exactly
    for system in (unit_cube(cap="3/2"), unit_cube()):
        poly = project_2d(system, "x", "y")
        pairs = scan_system(system, ("x", "y"), steps=20)
        expect = {
            (i, j)
            for i in range(21)
            for j in range(21)
            if poly.contains((F(i, 20), F(j, 20)))
        }
        assert pairs == expect


def test_contains_exact_boundary():
    poly = project_2d(unit_cube(cap="3/2"), "x", "y")
    assert poly.contains((F(1), F(1, 2)))  # on the capped edge
    assert poly.contains((F(3, 4), F(3, 4)))
    assert not poly.contains((F(1), F(51, 100)))
    assert poly.contains((1.0, 0.51), tol=2e-2)


def test_feasible_point_is_feasible():
    system = dshell_low_spin_system()
    point = feasible_point(system)
    assert point is not None
    values = [point[name] for name in system.variables]
    assert all(isinstance(v, Fraction) for v in values)
    assert system.contains_point(values)


def test_dshell_projection_is_rectangle():
    poly = project_2d(dshell_low_spin_system(), "l1", "mu")
    assert poly.vertices == (
        (F(3, 5), F(0)),
        (F(2), F(0)),
        (F(2), F(1)),
        (F(3, 5), F(1)),
    )
    assert poly.area() == F(7, 5)


def test_dshell_vertex_lifts():
    system = dshell_low_spin_system()
    poly = project_2d(system, "l1", "mu")
    for vx, vy in poly.vertices:
        lifted = lift_vertex(system, "l1", "mu", (vx, vy))
        assert lifted is not None
        values = [lifted[name] for name in system.variables]
        assert system.contains_point(values)
        assert lifted["l1"] == vx and lifted["mu"] == vy
    # the fully symmetric corner lifts to the equal-occupation spectrum
    low = lift_vertex(system, "l1", "mu", (F(3, 5), F(1)))
    assert [low[f"l{i}"] for i in range(1, 6)] == [F(3, 5)] * 5


def test_dshell_sampled_memberships():
    system = dshell_low_spin_system()
    poly = project_2d(system, "l1", "mu")
    rng = np.random.default_rng(12)
    hits = 0
    for _ in range(500):
        lam = np.sort(rng.dirichlet(np.ones(5)) * 3.0)[::-1]
        if lam[0] > 2.0 or lam[0] + 0.5 * (lam[3] + lam[4]) > 2.0:
            continue
        mu_lo = max(0.0, 2 * (lam[0] - lam[2]) - 3, 4 * lam[0] - 2 * lam[1] + 2 * lam[3] - 7)
        mu_hi = min(1.0, 3 - 2 * (lam[0] - lam[1]), 3 - 2 * (lam[1] - lam[2]))
        if mu_lo > mu_hi:
            continue
        mu = 0.5 * (mu_lo + mu_hi)
        hits += 1
        assert poly.contains((lam[0], mu), tol=1e-9)
    assert hits > 50  # rejection sampling leaves enough interior points


def test_catalog_projection_triangle():
    poly = project_2d(halfspaces_from_constraints(catalog(3, 7)), "l1", "l2")
    assert poly.vertices == (
        (F(3, 7), F(3, 7)),
        (F(1), F(1, 3)),
        (F(1), F(1)),
    )
    assert poly.area() == F(4, 21)
    spectra = sample_spectra(3, 7, 300, seed=3)
    for row in spectra:
        assert poly.contains((row[0], row[1]), tol=1e-9)


def test_d7_edges_exact():
    edges = dshell_d7_edges()
    assert edges.ab_line == (F(7), F(-8))
    assert edges.upper_line == (F(-9), F(16))
    assert edges.vertex_a == (F(7, 5), F(9, 5))
    assert edges.vertex_b == (F(3, 2), F(5, 2))
    with pytest.raises(ValueError):
        DShellEdges((F(7), F(-8)), (F(-9), F(16)), (F(1), F(1)), edges.vertex_b)


def test_classify_iron_point():
    edges = dshell_d7_edges()
    cls = classify_point((1.458, 2.22), edges, tol=0.05)
    assert cls.residual_ab == pytest.approx(0.014, abs=1e-12)
    assert cls.pinned_to_ab
    assert cls.below_upper
    assert cls.residual_upper == pytest.approx(2.22 - (16 - 9 * 1.458), abs=1e-12)
    # far point with the same mu is not pinned
    far = classify_point((1.2, 2.22), edges, tol=0.05)
    assert not far.pinned_to_ab
    assert far.residual_ab == pytest.approx(2.22 - (7 * 1.2 - 8), abs=1e-12)
    # on the line but outside the segment span
    outside = classify_point((1.0, -1.0), edges, tol=0.05)
    assert abs(outside.residual_ab) <= 1e-12
    assert not outside.pinned_to_ab


def test_emit_polygon_formats():
    poly = project_2d(unit_cube(), "x", "y")
    csv = emit_polygon(poly, "csv").decode()
    rows = csv.strip().split("\n")
    assert len(rows) == 5  # four vertices plus the repeated start
    assert rows[0] == rows[-1] == "0,0"
    blob = emit_polygon(poly, "json").decode()
    assert blob == "[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]"
    with pytest.raises(ValueError):
        emit_polygon(poly, "svg")
    with pytest.raises(ValueError):
        emit_polygon(Polygon2D((), empty=True), "csv")


def test_system_json_round_trip():
    system = dshell_low_spin_system()
    back = system_from_json(system_to_json(system))
    assert back == system
    with pytest.raises(FormatError):
        system_from_json("[")
    with pytest.raises(FormatError):
        system_from_json("[1, 2]")
    with pytest.raises(FormatError):
        system_from_json('{"variables": ["x"], "inequalities": [{"coefficients": ["x"], "bound": "1"}]}')
