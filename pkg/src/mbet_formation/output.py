"""CSV and plain-text writers for simulation results."""

from __future__ import annotations

import csv
from pathlib import Path

from .comms import EventRecord
from .sim import COL, TRAJ_COLUMNS, SummaryReport, TrajectoryLog

EVENT_COLUMNS = ("t", "enorm", "ethresh")


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def write_trajectory_csv(log: TrajectoryLog, path: str | Path) -> None:
    idx = [COL[c] for c in TRAJ_COLUMNS]
    ev = COL["event"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJ_COLUMNS)
        for row in log.data:
            w.writerow([str(int(row[i])) if i == ev else _fmt(row[i]) for i in idx])


def write_events_csv(events: list[EventRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVENT_COLUMNS)
        for e in events:
            w.writerow([_fmt(e.time), _fmt(e.error_norm), _fmt(e.threshold)])


def write_summary(report: SummaryReport, path: str | Path) -> None:
    Path(path).write_text("\n".join(report.lines()) + "\n")


def write_outputs(
    prefix: str | Path, log: TrajectoryLog, events: list[EventRecord], report: SummaryReport
) -> list[Path]:
    prefix = str(prefix)
    paths = [Path(prefix + s) for s in ("_traj.csv", "_events.csv", "_summary.txt")]
    for p in paths:
        p.parent.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(log, paths[0])
    write_events_csv(events, paths[1])
    write_summary(report, paths[2])
    return paths
