"""Command-line front end.

Subcommands: sample (random-state validity campaign), check (spectrum
file analysis), pin (state-file pinning analysis), demo-be and demo-iron
(embedded case studies), project (2D polytope projection).

Exit codes: 0 success, 1 malformed input or I/O failure, 2 sampling
found a constraint violation, 3 inadmissible spectrum, 4 infeasible or
unbounded projection.  Reports are plain tables on stdout, or JSON with
--json; identical arguments and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import constraints, pinning, polytope, rdm, spin
from .data import (
    BERYLLIUM_N,
    BERYLLIUM_OCCUPATIONS,
    BERYLLIUM_R,
    D7_SPIN_WEIGHTS,
    IRON_POINT,
)
from .fock import FermionState, FormatError, state_from_json

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VIOLATION = 2
EXIT_INADMISSIBLE = 3
EXIT_INFEASIBLE = 4

PRESETS = {"d3-low-spin": polytope.dshell_low_spin_system}

__all__ = ["main", "entry", "RunConfig"]


@dataclass(frozen=True)
class RunConfig:
    command: str
    path: Optional[str] = None
    out: Optional[str] = None
    n: int = 3
    r: int = 6
    seed: int = 0
    count: int = 1000
    tol_pin: float = pinning.EXPERIMENTAL_PIN_TOL
    tol_sat: float = constraints.SATURATION_TOL
    as_json: bool = False
    preset: Optional[str] = None
    axes: Optional[str] = None

    def __post_init__(self) -> None:
        if self.tol_pin <= 0 or self.tol_sat <= 0:
            raise ValueError("tolerances must be positive")
        if self.count < 1:
            raise ValueError("sample count must be at least 1")


class _Parser(argparse.ArgumentParser):
    # usage problems are input problems; keep exit code 2 for violations
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _fmt(value: float) -> str:
    return f"{float(value):.12g}"


def _default_seed() -> int:
    return int(os.environ.get("NREP_SEED", "0"))


def _emit(payload: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


def _write_out(path: Optional[str], blob: bytes, lines: list[str], title: str) -> None:
    if path:
        with open(path, "wb") as fh:
            fh.write(blob)
        lines.append(f"{title} written to {path}")
    else:
        lines.append(f"{title}:")
        lines.extend(blob.decode().rstrip("\n").split("\n"))


# --- sample -----------------------------------------------------------------

def cmd_sample(cfg: RunConfig) -> int:
    try:
        cset = constraints.catalog(cfg.n, cfg.r)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    spectra = rdm.sample_spectra(cfg.n, cfg.r, cfg.count, cfg.seed)
    coeffs, bounds, relations, labels = constraints.coefficient_arrays(cset)
    values = spectra @ coeffs.T
    residuals = bounds[None, :] - values
    is_eq = np.array([rel == "==" for rel in relations])
    violation = np.where(is_eq[None, :], np.abs(residuals), -residuals)
    max_violation = float(violation.max())
    worst_sample, worst_label = np.unravel_index(int(violation.argmax()), violation.shape)
    saturated_counts = (np.abs(residuals) <= cfg.tol_sat).sum(axis=0)

    ineq_viol = np.where(is_eq[None, :], -np.inf, violation)
    closest_idx = int(np.unravel_index(int(ineq_viol.argmax()), ineq_viol.shape)[0])
    top_idx = int(spectra[:, 0].argmax())

    ok = max_violation <= cfg.tol_sat
    lines = [
        f"sample campaign: n={cfg.n} r={cfg.r} count={cfg.count} seed={cfg.seed}",
        f"catalog: {len(labels)} constraints, {cset.completeness}",
        f"max violation: {_fmt(max_violation)} "
        f"({labels[worst_label]} at sample {worst_sample}) tol={_fmt(cfg.tol_sat)}",
        "saturation histogram (count of |residual| <= tol):",
    ]
    histogram = {}
    for i, label in enumerate(labels):
        histogram[label] = int(saturated_counts[i])
        lines.append(f"  {label:<22} {int(saturated_counts[i]):>8}")
    lines.append("extremal spectra:")
    lines.append("  max lambda_1: " + " ".join(_fmt(v) for v in spectra[top_idx]))
    lines.append("  closest inequality approach "
                 f"({labels[int(np.unravel_index(int(ineq_viol.argmax()), ineq_viol.shape)[1])]}): "
                 + " ".join(_fmt(v) for v in spectra[closest_idx]))
    lines.append("result: " + ("no violations" if ok else "VIOLATION FOUND"))
    payload = {
        "command": "sample",
        "n": cfg.n, "r": cfg.r, "count": cfg.count, "seed": cfg.seed,
        "tol_sat": cfg.tol_sat,
        "max_violation": float(max_violation),
        "worst_constraint": labels[worst_label],
        "saturation_histogram": histogram,
        "max_lambda1_spectrum": [float(_fmt(v)) for v in spectra[top_idx]],
        "ok": bool(ok),
    }
    _emit(payload, cfg.as_json, lines)
    return EXIT_OK if ok else EXIT_VIOLATION


# --- check ------------------------------------------------------------------

def _load_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_candidate_spectrum(path: str) -> tuple[int, int, tuple[float, ...]]:
    """Spectrum file contents without admissibility checks.

    Inadmissible values (Pauli violations, bad norm, unsorted) must reach
    the catalog to be reported as violations, not die in the parser.
    """
    text = _load_text(path)
    try:
        spec = rdm.spectrum_from_json(text)
        return spec.n_particles, spec.rank, spec.values
    except FormatError:
        raise
    except ValueError:
        try:
            payload = json.loads(text)
            values = tuple(float(v) for v in payload["lambda"])
            return int(payload["n"]), int(payload["r"]), values
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed spectrum file: {exc}") from exc


def _report_tables(n: int, r: int, values: tuple[float, ...],
                   tol_sat: float, tol_pin: float):
    cset = constraints.catalog(n, r)
    report = constraints.evaluate(cset, values, tol_sat)
    pin = pinning.detect(values, cset, tol_pin)
    lines = [
        f"spectrum: n={n} r={r}",
        "  " + " ".join(_fmt(v) for v in values),
        f"catalog: {len(cset.constraints)} constraints, {cset.completeness}",
        f"evaluation at tol={_fmt(tol_sat)}:",
        f"  {'label':<22} {'value':>14} {'bound':>8} rel {'residual':>13} status",
    ]
    for e in report.entries:
        c = cset.get(e.label)
        lines.append(
            f"  {e.label:<22} {_fmt(e.value):>14} {_fmt(float(c.bound)):>8} "
            f"{c.relation:<3} {_fmt(e.residual):>13} {e.status}"
        )
    sat_ineq = [lbl for lbl, _, status in pin.saturated()
                if cset.get(lbl).relation == "<="]
    lines.append(f"pinning at tol={_fmt(tol_pin)}:")
    if sat_ineq:
        for label in sat_ineq:
            c = cset.get(label)
            lines.append(f"  pinned: {c.pretty()}")
    else:
        lines.append(f"  no pinning at tol={_fmt(tol_pin)}")
    payload = {
        "n": n, "r": r,
        "spectrum": [float(_fmt(v)) for v in values],
        "tol_sat": tol_sat, "tol_pin": tol_pin,
        "completeness": cset.completeness,
        "evaluation": [
            {"label": e.label, "value": float(_fmt(e.value)),
             "residual": float(_fmt(e.residual)), "status": e.status}
            for e in report.entries
        ],
        "pinned": sat_ineq,
        "admissible": bool(report.ok()),
    }
    return report, lines, payload


def cmd_check(cfg: RunConfig) -> int:
    n, r, values = _load_candidate_spectrum(cfg.path)
    report, lines, payload = _report_tables(n, r, values, cfg.tol_sat, cfg.tol_pin)
    payload["command"] = "check"
    ok = report.ok()
    lines.append("admissible" if ok else "INADMISSIBLE")
    _emit(payload, cfg.as_json, lines)
    return EXIT_OK if ok else EXIT_INADMISSIBLE


# --- pin --------------------------------------------------------------------

def cmd_pin(cfg: RunConfig) -> int:
    state = state_from_json(_load_text(cfg.path))
    state = state.normalize()
    frame = rdm.natural_occupations(rdm.compute_rdm(state))
    natural = rdm.to_natural_basis(state)
    spec = frame.spectrum
    cset = constraints.catalog(spec.n_particles, spec.rank)
    pin = pinning.detect(spec, cset, cfg.tol_pin)

    lines = [
        f"state: n={state.n_particles} r={state.rank}, "
        f"{len(state.amplitudes)} determinants",
        "natural occupations: " + " ".join(_fmt(v) for v in spec.values),
    ]
    degenerate = any(
        abs(a - b) <= rdm.DEGENERACY_TOL
        for a, b in zip(spec.values, spec.values[1:])
    )
    if degenerate:
        lines.append("note: degenerate occupations; the natural orbital labeling "
                     "within a degenerate group is not unique")

    sat_ineq = [lbl for lbl, _, status in pin.saturated()
                if cset.get(lbl).relation == "<="]
    rules_out = []
    if not sat_ineq:
        lines.append(f"no pinning at tol={_fmt(cfg.tol_pin)}")
    for label in sat_ineq:
        c = cset.get(label)
        lines.append(f"pinned: {c.pretty()}")
        try:
            rule = pinning.selection_rule(c, spec.n_particles)
        except pinning.UnsupportedRuleError:
            lines.append("  no selection rule (coefficients not 0/1-integer)")
            continue
        basis = pinning.filter_basis(spec.n_particles, spec.rank, [rule])
        residual = pinning.verify_pinned_state(natural, rule)
        lines.append(
            f"  rule: |D intersect {sorted(rule.orbital_set)}| = {rule.count}; "
            f"admissible determinants: {len(basis)}; "
            f"eigenvector residual: {_fmt(residual)}"
        )
        rules_out.append({
            "label": label,
            "orbital_set": sorted(rule.orbital_set),
            "count": rule.count,
            "basis_size": len(basis),
            "residual": float(_fmt(residual)),
        })

    support = sorted(tuple(d) for d in natural.amplitudes)
    lines.append(f"natural-basis support: {len(support)} determinants")
    reconstruction = None
    if (spec.n_particles, spec.rank) == (3, 7):
        try:
            sa = pinning.reconstruct_structured(spec, cfg.tol_pin)
            lines.append(
                "structured reconstruction: "
                f"|alpha|^2={_fmt(sa.alpha_sq)} |beta|^2={_fmt(sa.beta_sq)} "
                f"|gamma|^2={_fmt(sa.gamma_sq)} |delta|^2={_fmt(sa.delta_sq)} "
                f"(spread {_fmt(sa.residual)})"
            )
            reconstruction = {
                "alpha_sq": float(_fmt(sa.alpha_sq)),
                "beta_sq": float(_fmt(sa.beta_sq)),
                "gamma_sq": float(_fmt(sa.gamma_sq)),
                "delta_sq_estimates": [float(_fmt(v)) for v in sa.delta_sq_estimates],
                "spread": float(_fmt(sa.residual)),
            }
        except ValueError as exc:
            lines.append(f"structured reconstruction not applicable: {exc}")

    payload = {
        "command": "pin",
        "n": state.n_particles, "r": state.rank,
        "tol_pin": cfg.tol_pin,
        "natural_occupations": [float(_fmt(v)) for v in spec.values],
        "degenerate": bool(degenerate),
        "pinned": sat_ineq,
        "rules": rules_out,
        "support_size": len(support),
        "reconstruction": reconstruction,
    }
    _emit(payload, cfg.as_json, lines)
    return EXIT_OK


# --- demos ------------------------------------------------------------------

def cmd_demo_be(cfg: RunConfig) -> int:
    full = rdm.Spectrum(BERYLLIUM_N, BERYLLIUM_R, BERYLLIUM_OCCUPATIONS)
    reduced = rdm.strip_inactive(full)
    report, lines, payload = _report_tables(
        reduced.n_particles, reduced.rank, reduced.values, cfg.tol_sat, cfg.tol_pin
    )
    header = [
        f"beryllium occupations ({BERYLLIUM_N}, {BERYLLIUM_R}): "
        + " ".join(_fmt(v) for v in BERYLLIUM_OCCUPATIONS),
        "dropping the filled first orbital and the two empty last ones",
    ]
    sa = pinning.reconstruct_structured(reduced)
    tail = [
        "structured state |Psi> = alpha|123> + beta|145> + gamma|167> + delta|246>:",
        f"  |alpha|^2 = {_fmt(sa.alpha_sq)}",
        f"  |beta|^2  = {_fmt(sa.beta_sq)}",
        f"  |gamma|^2 = {_fmt(sa.gamma_sq)}",
        "  |delta|^2 = " + " / ".join(_fmt(v) for v in sa.delta_sq_estimates)
        + f" (three estimates, spread {_fmt(sa.residual)})",
    ]
    payload.update({
        "command": "demo-be",
        "full_spectrum": [float(_fmt(v)) for v in BERYLLIUM_OCCUPATIONS],
        "reconstruction": {
            "alpha_sq": float(_fmt(sa.alpha_sq)),
            "beta_sq": float(_fmt(sa.beta_sq)),
            "gamma_sq": float(_fmt(sa.gamma_sq)),
            "delta_sq_estimates": [float(_fmt(v)) for v in sa.delta_sq_estimates],
            "spread": float(_fmt(sa.residual)),
        },
    })
    _emit(payload, cfg.as_json, header + lines + tail)
    return EXIT_OK if report.ok() else EXIT_INADMISSIBLE


def cmd_demo_iron(cfg: RunConfig) -> int:
    edges = polytope.dshell_d7_edges()
    cls = polytope.classify_point(IRON_POINT, edges, 0.05)
    mu_spec = spin.iron_spin_occupations()
    mu_val = spin.moment(mu_spec, D7_SPIN_WEIGHTS)
    cubic = spin.cubic_occupations(IRON_POINT[0])
    poly = polytope.project_2d(polytope.dshell_low_spin_system(), "l1", "mu")
    csv = polytope.emit_polygon(poly, "csv")

    ab_zero = -edges.ab_line[1] / edges.ab_line[0]
    up_zero = -edges.upper_line[1] / edges.upper_line[0]
    lines = [
        "d7 boundary edges:",
        f"  edge AB: mu = 7 n_t - 8 (mu=0 at n_t = {_fmt(ab_zero)})",
        f"  upper edge: mu = 16 - 9 n_t (mu=0 at n_t = {_fmt(up_zero)})",
        f"  A = ({_fmt(edges.vertex_a[0])}, {_fmt(edges.vertex_a[1])})",
        f"  B = ({_fmt(edges.vertex_b[0])}, {_fmt(edges.vertex_b[1])})",
        f"iron point (n_t, mu) = ({_fmt(IRON_POINT[0])}, {_fmt(IRON_POINT[1])}):",
        f"  residual to AB: {_fmt(cls.residual_ab)} (tol 0.05)",
        f"  pinned-to-AB: {'yes' if cls.pinned_to_ab else 'no'}",
        "spin occupations: " + " ".join(_fmt(v) for v in mu_spec),
        f"  moment 3mu1 + mu2 - mu3 - 3mu4 = {_fmt(mu_val)}",
        f"cubic splitting at n_t = {_fmt(IRON_POINT[0])}: n_e = {_fmt(cubic.n_e)}",
    ]
    payload = {
        "command": "demo-iron",
        "edge_ab": [float(v) for v in edges.ab_line],
        "edge_upper": [float(v) for v in edges.upper_line],
        "vertex_a": [float(v) for v in edges.vertex_a],
        "vertex_b": [float(v) for v in edges.vertex_b],
        "iron_point": [float(v) for v in IRON_POINT],
        "residual_ab": float(_fmt(cls.residual_ab)),
        "pinned_to_ab": cls.pinned_to_ab,
        "spin_occupations": [float(v) for v in mu_spec],
        "moment": float(_fmt(mu_val)),
        "n_e": float(_fmt(cubic.n_e)),
        "d3_polygon_csv": csv.decode(),
    }
    _write_out(cfg.out, csv, lines, "d3 low-spin (lambda_1, mu) polygon csv")
    _emit(payload, cfg.as_json, lines)
    return EXIT_OK


# --- project ----------------------------------------------------------------

def cmd_project(cfg: RunConfig) -> int:
    if cfg.preset:
        if cfg.preset not in PRESETS:
            print(f"error: unknown preset {cfg.preset!r}; "
                  f"available: {', '.join(sorted(PRESETS))}", file=sys.stderr)
            return EXIT_INPUT
        system = PRESETS[cfg.preset]()
    elif cfg.path:
        system = polytope.system_from_json(_load_text(cfg.path))
    else:
        print("error: provide a system file or --preset", file=sys.stderr)
        return EXIT_INPUT
    if cfg.axes:
        axes = [a.strip() for a in cfg.axes.split(",")]
        if len(axes) != 2:
            print("error: --axes needs exactly two comma-separated names",
                  file=sys.stderr)
            return EXIT_INPUT
    else:
        axes = list(system.variables[:2])
    try:
        poly = polytope.project_2d(system, axes[0], axes[1])
    except polytope.UnboundedProjectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        # unknown axis names and the like are input errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if poly.empty:
        print("error: system is infeasible; projection is empty", file=sys.stderr)
        return EXIT_INFEASIBLE
    blob = polytope.emit_polygon(poly, "json" if cfg.as_json else "csv")
    if cfg.out:
        with open(cfg.out, "wb") as fh:
            fh.write(blob)
        print(f"polygon ({axes[0]}, {axes[1]}) written to {cfg.out}")
    else:
        sys.stdout.write(blob.decode())
        if not blob.endswith(b"\n"):
            sys.stdout.write("\n")
    return EXIT_OK


# --- wiring -----------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="nrep", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p, *, tol_pin: float):
        p.add_argument("--tol-sat", type=float, default=constraints.SATURATION_TOL,
                       help="saturation/violation tolerance")
        p.add_argument("--tol-pin", type=float, default=tol_pin,
                       help="pinning detection tolerance")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("sample", help="random-state constraint validity campaign")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    add_common(p, tol_pin=pinning.EXPERIMENTAL_PIN_TOL)

    p = sub.add_parser("check", help="evaluate a spectrum JSON file")
    p.add_argument("path")
    add_common(p, tol_pin=pinning.EXPERIMENTAL_PIN_TOL)

    p = sub.add_parser("pin", help="pinning analysis of a state JSON file")
    p.add_argument("path")
    add_common(p, tol_pin=pinning.SYNTHETIC_PIN_TOL)

    p = sub.add_parser("demo-be", help="beryllium reduction and reconstruction")
    add_common(p, tol_pin=pinning.EXPERIMENTAL_PIN_TOL)

    p = sub.add_parser("demo-iron", help="iron d-shell boundary analysis")
    p.add_argument("--out", default=None, help="write the polygon csv here")
    add_common(p, tol_pin=pinning.EXPERIMENTAL_PIN_TOL)

    p = sub.add_parser("project", help="project a halfspace system to 2D")
    p.add_argument("path", nargs="?", default=None, help="halfspace system JSON")
    p.add_argument("--preset", default=None,
                   help=f"built-in system ({', '.join(sorted(PRESETS))})")
    p.add_argument("--axes", default=None, help="two variable names, e.g. l1,mu")
    p.add_argument("--out", default=None, help="output path")
    p.add_argument("--json", action="store_true", help="emit JSON instead of csv")
    return parser


def _config_from_args(args) -> RunConfig:
    seed = getattr(args, "seed", None)
    return RunConfig(
        command=args.command,
        path=getattr(args, "path", None),
        out=getattr(args, "out", None),
        n=getattr(args, "n", 3),
        r=getattr(args, "r", 6),
        seed=_default_seed() if seed is None else seed,
        count=getattr(args, "count", 1000),
        tol_pin=getattr(args, "tol_pin", pinning.EXPERIMENTAL_PIN_TOL),
        tol_sat=getattr(args, "tol_sat", constraints.SATURATION_TOL),
        as_json=getattr(args, "json", False),
        preset=getattr(args, "preset", None),
        axes=getattr(args, "axes", None),
    )


HANDLERS = {
    "sample": cmd_sample,
    "check": cmd_check,
    "pin": cmd_pin,
    "demo-be": cmd_demo_be,
    "demo-iron": cmd_demo_iron,
    "project": cmd_project,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from_args(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return HANDLERS[cfg.command](cfg)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
