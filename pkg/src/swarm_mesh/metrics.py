"""Evaluation metrics computed from episode traces, and report emission.

All functions are pure over trace files; collision-flagged episodes count in
denominators but contribute to neither the success numerator nor makespan
distributions.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .errors import ValidationError
from .runtime.trace import EpisodeTrace
from .world import EpisodeStatus

CSV_SCHEMA_VERSION = 1


def _goals(trace: EpisodeTrace) -> dict:
    return {i: np.asarray(g, dtype=float) for i, g in enumerate(trace.header["goals"])}


def trace_successful(trace: EpisodeTrace) -> bool:
    return trace.status is EpisodeStatus.ALL_AT_GOAL and not trace.collision_flag


def compute_makespan(trace: EpisodeTrace, goal_threshold: float | None = None) -> float | None:
    """Earliest time every agent is simultaneously within the goal threshold.

    None for collision-flagged or timed-out traces (excluded episodes).
    """
    if trace.collision_flag or trace.status is not EpisodeStatus.ALL_AT_GOAL:
        return None
    threshold = goal_threshold if goal_threshold is not None else float(
        trace.header["goal_threshold"]
    )
    goals = _goals(trace)
    starts = {i: np.asarray(p, dtype=float) for i, p in enumerate(trace.header["starts"])}
    if all(np.linalg.norm(starts[i] - goals[i]) <= threshold for i in goals):
        return 0.0
    for t, rows in trace.ticks().items():
        if len(rows) != len(goals):
            raise ValidationError("trace tick is missing agent rows")
        if all(
            np.linalg.norm(np.asarray(rows[i]["p"]) - goals[i]) <= threshold
            for i in goals
        ):
            return float(t)
    return None


def compute_success(traces) -> float:
    traces = list(traces)
    if not traces:
        raise ValidationError("success rate needs at least one trace")
    return sum(1 for tr in traces if trace_successful(tr)) / len(traces)


def compute_dmin_dorigin(trace: EpisodeTrace):
    """Per tick: minimum pairwise distance, minimum distance to the passage.

    The reference point is the passage center when the world has a wall,
    the origin otherwise.
    """
    if trace.n_agents < 2:
        raise ValidationError("d_min needs at least two agents")
    wall = trace.header.get("wall")
    if wall is not None:
        ref = (float(wall["x"]), float(wall["gap_center"]))
    else:
        ref = (0.0, 0.0)
    out = []
    for t, rows in trace.ticks().items():
        pts = [rows[i]["p"] for i in sorted(rows)]
        d_min = min(
            math.sqrt((pts[a][0] - pts[b][0]) ** 2 + (pts[a][1] - pts[b][1]) ** 2)
            for a in range(len(pts))
            for b in range(a + 1, len(pts))
        )
        d_origin = min(math.sqrt((p[0] - ref[0]) ** 2 + (p[1] - ref[1]) ** 2) for p in pts)
        out.append((float(t), d_min, d_origin))
    return out


def median_makespan(traces) -> float | None:
    spans = [compute_makespan(tr) for tr in traces]
    spans = [s for s in spans if s is not None]
    if not spans:
        return None
    return float(np.median(spans))


def summarize(traces, label: str = "") -> dict:
    traces = list(traces)
    counts = {status.value: 0 for status in EpisodeStatus if status.terminal}
    for tr in traces:
        counts[tr.status.value] += 1
    return {
        "label": label,
        "episodes": len(traces),
        "success_rate": compute_success(traces),
        "median_makespan": median_makespan(traces),
        "status_counts": counts,
    }


# ---------------------------------------------------------------------------
# report emission (summary.json + plot-ready CSV files)


def _csv_header(columns) -> str:
    return f"# schema={CSV_SCHEMA_VERSION} columns={','.join(columns)}\n" + ",".join(columns) + "\n"


def load_traces(directory) -> list[EpisodeTrace]:
    files = sorted(
        f for f in os.listdir(directory) if f.endswith(".ndjson")
    )
    if not files:
        raise ValidationError(f"no trace files in {directory}")
    return [EpisodeTrace.load(os.path.join(directory, f)) for f in files]


def write_report(traces_dir, out_dir, compare_dir=None, label=None) -> dict:
    traces = load_traces(traces_dir)
    os.makedirs(out_dir, exist_ok=True)
    summary = summarize(traces, label or traces[0].header.get("mode", ""))
    if compare_dir is not None:
        baseline = load_traces(compare_dir)
        summary = {
            "primary": summary,
            "baseline": summarize(baseline, baseline[0].header.get("mode", "")),
        }

    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)

    with open(os.path.join(out_dir, "makespans.csv"), "w") as fh:
        fh.write(_csv_header(["episode", "makespan"]))
        for k, tr in enumerate(traces):
            span = compute_makespan(tr)
            if span is not None:
                fh.write(f"{k},{span}\n")

    with open(os.path.join(out_dir, "positions.csv"), "w") as fh:
        fh.write(_csv_header(["episode", "t", "agent", "p_x", "p_y"]))
        for k, tr in enumerate(traces):
            for row in tr.rows:
                fh.write(
                    f"{k},{row['t']},{row['agent']},{row['p'][0]},{row['p'][1]}\n"
                )

    with open(os.path.join(out_dir, "dmin_dorigin.csv"), "w") as fh:
        fh.write(_csv_header(["episode", "t", "d_min", "d_origin"]))
        for k, tr in enumerate(traces):
            if tr.n_agents < 2:
                continue
            for t, d_min, d_origin in compute_dmin_dorigin(tr):
                fh.write(f"{k},{t},{d_min},{d_origin}\n")

    return summary
