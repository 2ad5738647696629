"""Command-line interface.

Exit codes:
    0  success (all checks pass)
    1  check-gains: a stability condition fails; lincheck: Jacobian mismatch
    2  configuration could not be read or validated
    3  simulation aborted
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import __version__
from .config import ConfigError, load_scenario
from .control import check_stability_x, check_stability_y
from .linear_model import (
    LinearizedSystem,
    build_linear_system,
    finite_difference_jacobians,
    max_jacobian_mismatch,
)
from .output import write_outputs
from .sim import Scenario, SimulationAbort, run_scenario, summarize

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3
LINCHECK_TOL = 1e-6


def _load(args) -> Scenario:
    return load_scenario(args.config, sigma=getattr(args, "sigma", None))


def cmd_simulate(args) -> int:
    scenario = _load(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            log, events = run_scenario(scenario)
        except SimulationAbort as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ABORT
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    report = summarize(log, events, scenario)
    for p in write_outputs(args.out, log, events, report):
        print(f"wrote {p}")
    print("\n".join(report.lines()))
    return EXIT_OK


def cmd_check_gains(args) -> int:
    s = _load(args)
    verdicts = [
        check_stability_x(s.gains_x, s.tc_wingman.tau_v),
        check_stability_y(s.gains_y, s.tc_wingman.tau_psi, s.spec),
    ]
    for v in verdicts:
        for i, c in enumerate(v.conditions, 1):
            status = "PASS" if c.passed else "FAIL"
            print(f"{v.channel}-channel condition {i}: {c.label}: "
                  f"lhs={c.lhs:.9g} rhs={c.rhs:.9g} {status}")
    ok = all(v.stable for v in verdicts)
    print("all conditions PASS" if ok else "stability conditions FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def lincheck(s: Scenario, lin: LinearizedSystem | None = None) -> dict[str, float]:
    """Max absolute difference between the analytic and finite-difference Jacobians."""
    if lin is None:
        lin = build_linear_system(s.spec, s.tc_leader, s.tc_wingman)
    fd = finite_difference_jacobians(s.spec, s.tc_leader, s.tc_wingman)
    return max_jacobian_mismatch(lin, fd)


def cmd_lincheck(args) -> int:
    s = _load(args)
    lin = build_linear_system(s.spec, s.tc_leader, s.tc_wingman)
    mism = lincheck(s, lin)
    with np.printoptions(precision=6, suppress=True, linewidth=120):
        print("A =\n" + str(lin.A))
        print("B =\n" + str(lin.B))
        print("E =\n" + str(lin.E))
    print(f"A[0][4] = {lin.A[0, 4]:.9g}  B[0][1] = {lin.B[0, 1]:.9g}")
    for k, v in mism.items():
        print(f"max |{k}_fd - {k}| = {v:.3e}")
    ok = all(v < LINCHECK_TOL for v in mism.values())
    print("lincheck PASS" if ok else "lincheck FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mbet-formation",
        description="Leader-wingman formation simulation with event-triggered communication.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write CSV/summary files")
    sim.add_argument("--config", required=True,
                     help="JSON config path, or a bundled name (paper_example)")
    sim.add_argument("--out", required=True, help="output prefix")
    sim.add_argument("--sigma", type=float, default=None, help="override trigger.sigma")
    sim.set_defaults(func=cmd_simulate)

    cg = sub.add_parser("check-gains", help="evaluate the PI gain stability conditions")
    cg.add_argument("--config", required=True)
    cg.set_defaults(func=cmd_check_gains)

    lc = sub.add_parser("lincheck", help="compare the linear model with finite differences")
    lc.add_argument("--config", required=True)
    lc.set_defaults(func=cmd_lincheck)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
