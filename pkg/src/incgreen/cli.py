"""Command-line interface.

Subcommands: eval, grid, validate, convergence, reproduce.

Exit codes: 0 success, 2 unusable configuration, 3 domain precondition
violated, 4 validation gate failed, 5 reference-solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

from . import diagnostics, engine, oracle
from .geometry import (DomainError, Scenario, ScenarioFormatError, Material,
                       Inclusion, load_scenario, scenario_to_dict, validate)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_VALIDATION = 4
EXIT_ORACLE = 5

# built-in study configurations ------------------------------------------------

_CAST_IRON = 5.6e10

# six-inclusion benchmark body: cast-iron matrix, R = 150 m
_BENCHMARK = Scenario(
    outer_radius=150.0,
    matrix=Material(_CAST_IRON),
    inclusions=(
        Inclusion((-90.0, 40.0), 27.0, Material(2.6316e10)),   # aluminium
        Inclusion((-50.0, -50.0), 24.0, Material(4.0741e10)),  # copper
        Inclusion((-30.0, 10.0), 9.0, Material(7.7519e10)),    # iron
        Inclusion((20.0, 70.0), 19.5, Material(7.5188e10)),    # steel alloy
        Inclusion((50.0, 0.0), 22.5, Material(8.0078e10)),     # AISI 4340
        Inclusion((70.0, -80.0), 15.0, Material(9.0496e10)),   # Nimonic 90
    ),
)

# single aluminium inclusion in a small cast-iron disk
_SINGLE = Scenario(
    outer_radius=30.0,
    matrix=Material(_CAST_IRON),
    inclusions=(Inclusion((0.0, 0.0), 7.0, Material(2.6316e10)),),
)

REPRODUCE_CASES = {
    "fig1": {"scenario": _SINGLE, "y": (10.0, 10.0),
             "extent": (-30.0, 30.0, -30.0, 30.0)},
    "example1": {"scenario": _BENCHMARK, "y": (-10.0, -80.0),
                 "extent": (-150.0, 150.0, -150.0, 150.0)},
    "example2": {"scenario": _BENCHMARK, "y": (60.0, 0.0),
                 "extent": (-150.0, 150.0, -150.0, 150.0)},
}


def _parse_point(text):
    try:
        a, b = text.split(",")
        return (float(a), float(b))
    except ValueError as exc:
        raise ScenarioFormatError(f"expected 'x,y', got {text!r}") from exc


def _parse_extent(text):
    try:
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError
        return tuple(parts)
    except ValueError as exc:
        raise ScenarioFormatError(
            f"expected 'xmin,xmax,ymin,ymax', got {text!r}") from exc


def _parse_grid(text):
    try:
        nx, ny = text.lower().split("x")
        nx, ny = int(nx), int(ny)
        if nx < 1 or ny < 1:
            raise ValueError
        return nx, ny
    except ValueError as exc:
        raise ScenarioFormatError(f"expected 'NXxNY', got {text!r}") from exc


def _parse_scales(text):
    try:
        scales = [float(s) for s in text.split(",")]
        if not scales or any(s <= 0 for s in scales):
            raise ValueError
        return scales
    except ValueError as exc:
        raise ScenarioFormatError(
            f"expected comma-separated positive scales, got {text!r}") from exc


def _load_config(args) -> Scenario:
    if args.config is None:
        raise ScenarioFormatError("--config is required for this command")
    return load_scenario(args.config)


def _require_valid(scenario: Scenario):
    problems = validate(scenario)
    if problems:
        raise DomainError("scenario failed validation: " + "; ".join(problems))


def cmd_eval(args) -> int:
    scenario = _load_config(args)
    _require_valid(scenario)
    x = _parse_point(args.x)
    y = _parse_point(args.y)
    if args.quantity == "grad":
        res = engine.grad_r_eps(scenario, x, y)
        print(f"grad_x={res.gradient[0]!r}")
        print(f"grad_y={res.gradient[1]!r}")
        print(f"magnitude={math.hypot(*res.gradient)!r}")
    else:
        fn = engine.n_eps if args.quantity == "neps" else engine.r_eps
        res = fn(scenario, x, y, normalized=args.normalized)
        print(f"value={res.value!r}")
        for name, term in res.terms.items():
            print(f"term.{name}={term!r}")
    print(f"region_x={res.region_x.label()}")
    print(f"region_y={res.region_y.label()}")
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_grid(args) -> int:
    scenario = _load_config(args)
    _require_valid(scenario)
    y = _parse_point(args.y)
    nx, ny = _parse_grid(args.grid)
    extent = _parse_extent(args.extent)
    field = engine.grid_eval(scenario, y, extent, nx, ny,
                             quantity=args.quantity,
                             normalized=args.normalized)
    with open(args.out, "w") as fh:
        engine.write_grid_csv(field, fh)
    print(f"wrote {nx}x{ny} {args.quantity} grid to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = _load_config(args)
    problems = validate(scenario)
    if problems:
        for p in problems:
            print(f"FAIL geometry: {p}")
        return EXIT_VALIDATION
    print("PASS geometry")
    ok = True

    # far-field decay of each inclusion's kernel remainder
    for j, inc in enumerate(scenario.inclusions):
        import incgreen.model_fields as mf
        cif = mf.CircularInclusionFields(1.0, scenario.matrix.shear_modulus,
                                         inc.material.shear_modulus)
        rep = diagnostics.decay_check(cif, (2.0, 0.7))
        tag = "exact" if rep.exact else f"slope={rep.slope:.3f}"
        print(f"{'PASS' if rep.passed else 'FAIL'} decay inclusion {j} ({tag})")
        ok = ok and rep.passed

    # kernel symmetry over a seeded probe pairing
    probes = diagnostics.matrix_probes(scenario, n=32, seed=args.seed,
                                       interface_clearance=0.2)
    pairs = list(zip(probes[:16], probes[16:]))
    rep = diagnostics.symmetry_sweep(scenario, pairs)
    worst = max((g["max_asymmetry"] / max(g["max_value"], 1e-300)
                 for g in rep.groups.values()), default=0.0)
    sym_ok = worst <= 1e-10
    print(f"{'PASS' if sym_ok else 'FAIL'} symmetry "
          f"(worst relative asymmetry {worst:.3e})")
    ok = ok and sym_ok
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_convergence(args) -> int:
    scenario = _load_config(args)
    _require_valid(scenario)
    y = _parse_point(args.y)
    scales = _parse_scales(args.scales)
    rep = diagnostics.convergence_study(scenario, y, scales=scales,
                                        n_modes=args.n_modes, seed=args.seed)
    for s, e in zip(rep.scales, rep.errors):
        print(f"scale={s!r} sup_error={e!r}")
    if rep.floor_limited:
        print("slope=floor-limited")
    else:
        print(f"slope={rep.slope!r}")
    print(f"{'PASS' if rep.passed else 'FAIL'} convergence")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"scales": rep.scales, "errors": rep.errors,
                       "slope": rep.slope, "passed": rep.passed,
                       "floor_limited": rep.floor_limited,
                       "details": rep.details}, fh, indent=2)
    return EXIT_OK if rep.passed else EXIT_VALIDATION


def reproduce_case(name: str, out_dir: str, grid_n: int = 256,
                   n_modes: int = 32, seed: int = 42,
                   equal_moduli: bool = False) -> dict:
    """Run one built-in study: gradient-magnitude grid plus a reference
    comparison over probes well separated from every interface."""
    case = REPRODUCE_CASES[name]
    scenario = case["scenario"]
    if equal_moduli:
        mu = scenario.matrix.shear_modulus
        scenario = Scenario(
            scenario.outer_radius, scenario.matrix,
            tuple(Inclusion(i.center, i.radius, Material(mu))
                  for i in scenario.inclusions),
            scenario.epsilon)
    y = case["y"]

    t0 = time.monotonic()
    field = engine.grid_eval(scenario, y, case["extent"], grid_n, grid_n,
                             quantity="grad")
    os.makedirs(out_dir, exist_ok=True)
    grid_path = os.path.join(out_dir, f"{name}_grad.csv")
    with open(grid_path, "w") as fh:
        engine.write_grid_csv(field, fh)

    probes = diagnostics.matrix_probes(scenario, n=64, seed=seed,
                                       interface_clearance=1.5)
    report = oracle.compare(scenario, y, probes, n_modes=n_modes)
    report["case"] = name
    report["grid_csv"] = grid_path
    report["elapsed_s"] = time.monotonic() - t0
    report["rel_sup_grad_error"] = (report["sup_grad_error"]
                                    / report["grad_scale"])
    with open(os.path.join(out_dir, f"{name}_report.json"), "w") as fh:
        json.dump(report, fh, indent=2)
    return report


def cmd_reproduce(args) -> int:
    rep = reproduce_case(args.case, args.out, grid_n=args.grid_n,
                         n_modes=args.n_modes, seed=args.seed,
                         equal_moduli=args.equal_moduli)
    print(f"case={args.case}")
    print(f"grid_csv={rep['grid_csv']}")
    print(f"rel_sup_grad_error={rep['rel_sup_grad_error']!r}")
    print(f"sup_value_error={rep['sup_value_error']!r}")
    print(f"elapsed_s={rep['elapsed_s']:.1f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="incgreen",
        description="Transmission kernel of a disk with small circular "
                    "inclusions: asymptotic evaluation, reference solver, "
                    "and diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_y=True):
        p.add_argument("--config", help="scenario JSON file")
        if needs_y:
            p.add_argument("--y", required=True, help="source point 'x,y'")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--n-modes", type=int, default=32, dest="n_modes")

    p = sub.add_parser("eval", help="evaluate the kernel at one point pair")
    common(p)
    p.add_argument("--x", required=True, help="field point 'x,y'")
    p.add_argument("--quantity", choices=["neps", "reps", "grad"],
                   default="reps")
    p.add_argument("--normalized", action="store_true",
                   help="zero-boundary-mean normalization")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid", help="sample a quantity on a grid into CSV")
    common(p)
    p.add_argument("--grid", required=True, help="resolution 'NXxNY'")
    p.add_argument("--extent", required=True, help="'xmin,xmax,ymin,ymax'")
    p.add_argument("--quantity", choices=["neps", "reps", "grad"],
                   default="reps")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("validate", help="run the scenario quality gates")
    common(p, needs_y=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convergence", help="shrink-rate study against the "
                                           "reference solver")
    common(p)
    p.add_argument("--scales", default="0.5,0.25,0.125")
    p.add_argument("--out", help="optional JSON report path")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("reproduce", help="run a built-in benchmark study")
    p.add_argument("case", choices=sorted(REPRODUCE_CASES))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--grid-n", type=int, default=256, dest="grid_n")
    p.add_argument("--n-modes", type=int, default=32, dest="n_modes")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--equal-moduli", action="store_true",
                   help="override every inclusion modulus with the matrix "
                        "modulus (zero contrast)")
    p.set_defaults(func=cmd_reproduce)
    return parser


_VALUE_FLAGS = {"--x", "--y", "--extent", "--scales"}


def _join_negative_values(argv):
    """Fold '--x -3,2' into '--x=-3,2' so argparse does not mistake the
    leading minus for an option."""
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(
        sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args)
    except ScenarioFormatError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except oracle.OracleError as exc:
        print(f"reference solver error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
