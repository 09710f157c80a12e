"""Episode traces: newline-delimited JSON, one record per tick per agent."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import ValidationError
from ..world import EpisodeStatus

TRACE_FORMAT_VERSION = 1


def _round_vec(v):
    return [float(v[0]), float(v[1])]


@dataclass
class EpisodeTrace:
    header: dict
    rows: list = field(default_factory=list)  # tick/agent record dicts
    status: EpisodeStatus = EpisodeStatus.RUNNING
    makespan: float | None = None
    collision_flag: bool = False

    @property
    def n_agents(self) -> int:
        return int(self.header["n"])

    @property
    def dt(self) -> float:
        return float(self.header["dt"])

    def add_agent_row(self, t, agent, p, v_m, v_d, a_d, neighbors,
                      sent, received, wall_hit, agent_hits):
        self.rows.append({
            "type": "tick",
            "t": round(float(t), 9),
            "agent": int(agent),
            "p": _round_vec(p),
            "v_m": _round_vec(v_m),
            "v_d": _round_vec(v_d),
            "a_d": _round_vec(a_d),
            "neighbors": sorted(int(x) for x in neighbors),
            "sent": int(sent),
            "received": int(received),
            "wall_hit": bool(wall_hit),
            "agent_hits": sorted(int(x) for x in agent_hits),
        })

    def finish(self, status: EpisodeStatus, makespan, collision_flag: bool):
        self.status = status
        self.makespan = makespan
        self.collision_flag = collision_flag

    def ticks(self) -> dict:
        """Rows grouped by timestamp: {t: {agent_id: row}} in time order."""
        grouped: dict = {}
        for row in self.rows:
            grouped.setdefault(row["t"], {})[row["agent"]] = row
        return dict(sorted(grouped.items()))

    # -- serialization ----------------------------------------------------

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(json.dumps(self.header, sort_keys=True, separators=(",", ":")))
            fh.write("\n")
            for row in self.rows:
                fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")))
                fh.write("\n")
            footer = {
                "type": "end",
                "status": self.status.value,
                "makespan": self.makespan,
                "collision_flag": self.collision_flag,
                "rows": len(self.rows),
            }
            fh.write(json.dumps(footer, sort_keys=True, separators=(",", ":")))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "EpisodeTrace":
        header = None
        rows = []
        footer = None
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(
                        f"{path}: line {lineno} is not valid JSON: {exc.msg}"
                    ) from exc
                kind = rec.get("type")
                if kind == "header":
                    header = rec
                elif kind == "tick":
                    rows.append(rec)
                elif kind == "end":
                    footer = rec
                else:
                    raise ValidationError(f"{path}: unknown record type {kind!r}")
        if header is None or footer is None:
            raise ValidationError(f"{path}: missing header or footer record")
        if footer.get("rows") != len(rows):
            raise ValidationError(f"{path}: truncated trace")
        trace = cls(header=header, rows=rows)
        trace.finish(EpisodeStatus(footer["status"]), footer.get("makespan"),
                     bool(footer.get("collision_flag")))
        return trace


def make_header(episode, mode_name, preset_name, seed, n, dt, world_cfg,
                starts, goals) -> dict:
    return {
        "type": "header",
        "version": TRACE_FORMAT_VERSION,
        "episode": int(episode),
        "mode": mode_name,
        "preset": preset_name,
        "seed": int(seed),
        "n": int(n),
        "dt": round(float(dt), 9),
        "goal_threshold": world_cfg.goal_threshold,
        "collision_threshold": world_cfg.agent_collision_threshold,
        "timeout": world_cfg.episode_timeout,
        "wall": None if world_cfg.wall is None else {
            "x": world_cfg.wall.x,
            "thickness": world_cfg.wall.thickness,
            "gap_center": world_cfg.wall.gap_center,
            "gap_width": world_cfg.wall.gap_width,
        },
        "starts": [list(map(float, p)) for p in starts],
        "goals": [list(map(float, p)) for p in goals],
    }
