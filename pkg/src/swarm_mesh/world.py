"""Deterministic planar world.

Holonomic acceleration-constrained kinematics, a wall with a narrow passage,
collision handling that stops offenders in place, radius-based neighborhood
graphs (fixed / infinite / per-tick Gaussian), and scenario generation with
goal-chained episodes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng
from .errors import ValidationError


def _vec2(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (2,) or not np.isfinite(v).all():
        raise ValidationError(f"expected a finite 2-vector, got {x!r}")
    return v


def clamp_norm(v: np.ndarray, limit: float) -> np.ndarray:
    """Scale v down so its Euclidean norm does not exceed limit."""
    n = float(np.linalg.norm(v))
    if n <= limit or n == 0.0:
        return v
    return v * (limit / n)


@dataclass(frozen=True)
class Wall:
    """Axis-aligned wall along the y-axis with a passage gap."""

    x: float = 0.0
    thickness: float = 0.2
    gap_center: float = 0.0
    gap_width: float = 1.0

    @property
    def passage_center(self) -> np.ndarray:
        return np.array([self.x, self.gap_center])


@dataclass(frozen=True)
class WorldConfig:
    a_max: float = 1.0
    v_max: float = 1.0
    dt: float = 0.1
    wall: Wall | None = field(default_factory=Wall)
    arena_half_extent: float = 4.0
    goal_threshold: float = 0.25
    agent_collision_threshold: float = 0.32
    agent_radius: float = 0.16
    episode_timeout: float = 30.0

    def __post_init__(self):
        if min(self.a_max, self.v_max, self.dt) <= 0:
            raise ValidationError("a_max, v_max and dt must all be positive")
        if self.agent_radius <= 0:
            raise ValidationError("agent_radius must be positive")
        if self.wall is not None and self.wall.gap_width <= 2 * self.agent_radius:
            raise ValidationError("passage gap must be wider than an agent disc")


@dataclass(frozen=True)
class AgentKinematics:
    id: int
    p: np.ndarray  # position (m)
    v_m: np.ndarray  # measured velocity (m/s)
    v_d: np.ndarray  # last desired velocity (m/s)
    a_d: np.ndarray  # last applied desired acceleration (m/s^2)
    p_g: np.ndarray  # goal (m)
    radius: float = 0.16

    def __post_init__(self):
        for name in ("p", "v_m", "v_d", "a_d", "p_g"):
            object.__setattr__(self, name, _vec2(getattr(self, name)))
        if self.radius <= 0:
            raise ValidationError("agent radius must be positive")

    @classmethod
    def at_rest(cls, agent_id: int, p, p_g, radius: float = 0.16) -> "AgentKinematics":
        zero = np.zeros(2)
        return cls(id=agent_id, p=_vec2(p), v_m=zero, v_d=zero, a_d=zero,
                   p_g=_vec2(p_g), radius=radius)


@dataclass(frozen=True)
class CommConfig:
    rule: str = "fixed"  # fixed | infinite | gaussian
    radius: float = 2.0
    mean: float = 2.0
    stddev: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.rule not in ("fixed", "infinite", "gaussian"):
            raise ValidationError(f"unknown communication rule {self.rule!r}")
        if self.rule == "fixed" and self.radius <= 0:
            raise ValidationError("communication radius must be positive")
        if self.rule == "gaussian" and (self.mean <= 0 or self.stddev <= 0):
            raise ValidationError("gaussian mean and stddev must be positive")


class NeighborhoodGraph:
    """Directed communication graph with relative-position edge features.

    Self-edges are never stored; the policy adds its own self-loop.
    """

    def __init__(self, nodes, edges):
        self.nodes = tuple(nodes)
        # edges: {(j, i): feature} meaning j's message reaches i
        self.edges = dict(edges)
        self._in = {i: [] for i in self.nodes}
        for (j, i) in self.edges:
            self._in[i].append(j)
        for lst in self._in.values():
            lst.sort()

    def in_neighbors(self, i: int) -> list[int]:
        return list(self._in[i])

    def has_edge(self, j: int, i: int) -> bool:
        return (j, i) in self.edges

    def edge_feature(self, j: int, i: int) -> np.ndarray:
        return self.edges[(j, i)]

    def edge_count(self) -> int:
        return len(self.edges)

    def is_symmetric(self) -> bool:
        return all((i, j) in self.edges for (j, i) in self.edges)


def step_dynamics(s: AgentKinematics, v_d, cfg: WorldConfig) -> AgentKinematics:
    """Advance one control tick with acceleration and speed clamps."""
    v_d = _vec2(v_d)
    dv = clamp_norm(v_d - s.v_m, cfg.a_max * cfg.dt)
    v_new = clamp_norm(s.v_m + dv, cfg.v_max)
    p_new = s.p + v_new * cfg.dt
    return replace(s, p=p_new, v_m=v_new, v_d=v_d, a_d=dv / cfg.dt)


def _disc_overlaps_rect(center, radius, xlo, xhi, ylo, yhi) -> bool:
    cx = min(max(center[0], xlo), xhi)
    cy = min(max(center[1], ylo), yhi)
    dx, dy = center[0] - cx, center[1] - cy
    return dx * dx + dy * dy < radius * radius


def disc_hits_wall(p, radius: float, cfg: WorldConfig) -> bool:
    """Does a disc at p overlap the wall segments (the gap is open)?"""
    wall = cfg.wall
    if wall is None:
        return False
    xlo = wall.x - wall.thickness / 2.0
    xhi = wall.x + wall.thickness / 2.0
    big = cfg.arena_half_extent + radius + 1.0
    upper = (xlo, xhi, wall.gap_center + wall.gap_width / 2.0, big)
    lower = (xlo, xhi, -big, wall.gap_center - wall.gap_width / 2.0)
    return _disc_overlaps_rect(p, radius, *upper) or _disc_overlaps_rect(p, radius, *lower)


def resolve_wall_collision(
    before: AgentKinematics, after: AgentKinematics, cfg: WorldConfig
) -> tuple[AgentKinematics, bool]:
    """Revert a step that drove the agent disc into the wall; stop the agent."""
    if disc_hits_wall(after.p, after.radius, cfg):
        stopped = replace(after, p=before.p, v_m=np.zeros(2))
        return stopped, True
    return after, False


def detect_agent_collisions(states, threshold: float) -> set[tuple[int, int]]:
    """Unordered id pairs with center distance strictly below threshold."""
    if threshold <= 0:
        raise ValidationError("collision threshold must be positive")
    out = set()
    items = sorted(states, key=lambda s: s.id)
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            d = float(np.linalg.norm(items[a].p - items[b].p))
            if d < threshold:
                out.add((items[a].id, items[b].id))
    return out


def compute_neighborhood(positions: dict, cc: CommConfig, tick: int) -> NeighborhoodGraph:
    """Communication graph for one tick.

    positions maps agent id -> position.  Under the gaussian rule, each
    ordered pair draws an independent range per tick, seeded by
    (seed, tick, sender, receiver) so edges are reproducible and directional.
    """
    ids = sorted(positions)
    edges = {}
    for i in ids:
        for j in ids:
            if i == j:
                continue
            rel = _vec2(positions[j]) - _vec2(positions[i])
            dist = float(np.linalg.norm(rel))
            if cc.rule == "infinite":
                present = True
            elif cc.rule == "fixed":
                present = dist <= cc.radius
            else:
                r = cc.mean + cc.stddev * rng.normal(cc.seed, "comm", tick, j, i)
                present = dist <= max(0.0, r)
            if present:
                edges[(j, i)] = rel  # feature: sender position relative to receiver
    return NeighborhoodGraph(ids, edges)


class EpisodeStatus(enum.Enum):
    RUNNING = "running"
    ALL_AT_GOAL = "all_at_goal"
    TIMED_OUT = "timed_out"
    COLLISION_FLAGGED = "collision_flagged"

    @property
    def terminal(self) -> bool:
        return self is not EpisodeStatus.RUNNING


def all_at_goal(states, threshold: float) -> bool:
    return all(float(np.linalg.norm(s.p - s.p_g)) <= threshold for s in states)


def check_termination(
    states, cfg: WorldConfig, t: float, collision_flagged: bool = False
) -> EpisodeStatus:
    """Episode status at time t; collision flags latch for the whole episode.

    A collision does not abort the episode: the run keeps stepping so its
    trace stays complete, but once a natural end is reached the episode is
    classified COLLISION_FLAGGED instead of a success/timeout.
    """
    if t < 0:
        raise ValidationError("time must be non-negative")
    done = all_at_goal(states, cfg.goal_threshold)
    timed_out = t >= cfg.episode_timeout
    if not done and not timed_out:
        return EpisodeStatus.RUNNING
    if collision_flagged:
        return EpisodeStatus.COLLISION_FLAGGED
    return EpisodeStatus.ALL_AT_GOAL if done else EpisodeStatus.TIMED_OUT


@dataclass(frozen=True)
class ScenarioSpec:
    n: int
    starts: tuple  # n positions
    goal_sets: tuple  # E lists of n positions
    chaining: bool = True

    def __post_init__(self):
        if len(self.starts) != self.n:
            raise ValidationError("starts must list one position per agent")
        for gs in self.goal_sets:
            if len(gs) != self.n:
                raise ValidationError("every goal set must list one goal per agent")
        object.__setattr__(
            self, "starts", tuple(tuple(float(c) for c in p) for p in self.starts)
        )
        object.__setattr__(
            self,
            "goal_sets",
            tuple(tuple(tuple(float(c) for c in p) for p in gs) for gs in self.goal_sets),
        )

    @property
    def episode_configs(self) -> int:
        return len(self.goal_sets)


def spawn_scenario(spec: ScenarioSpec, episode_index: int, previous_goals=None):
    """Starts and goals for one episode; chained starts after episode 0."""
    if episode_index == 0 or not spec.chaining:
        starts = spec.starts
    else:
        if previous_goals is None:
            raise ValidationError("chained episodes need the previous goals")
        if len(previous_goals) != spec.n:
            raise ValidationError("previous goals must match the agent count")
        starts = tuple(tuple(float(c) for c in p) for p in previous_goals)
    goals = spec.goal_sets[episode_index % len(spec.goal_sets)]
    return starts, goals


def cross_formation(center, spacing: float = 1.0, n: int = 5):
    """Cross-shaped formation: center plus the four axis offsets."""
    cx, cy = float(center[0]), float(center[1])
    pts = [
        (cx, cy),
        (cx + spacing, cy),
        (cx - spacing, cy),
        (cx, cy + spacing),
        (cx, cy - spacing),
    ]
    if n > len(pts):
        raise ValidationError("cross formation supports at most 5 agents")
    return tuple(pts[:n])


def make_passage_scenario(
    n: int = 5,
    episodes: int = 16,
    seed: int = 0,
    spacing: float = 1.0,
    offset: float = 2.0,
    collision_threshold: float = 0.32,
) -> ScenarioSpec:
    """Passage case study: cross formations mirrored across the wall.

    Goal sets alternate sides so chained episodes cross back and forth;
    agent/goal assignments are permuted per episode, deterministically.
    """
    left = cross_formation((-offset, 0.0), spacing, n)
    right = cross_formation((offset, 0.0), spacing, n)
    gen = np.random.default_rng(seed)
    goal_sets = []
    for e in range(episodes):
        base = right if e % 2 == 0 else left
        perm = gen.permutation(n)
        goal_sets.append(tuple(base[k] for k in perm))
    spec = ScenarioSpec(n=n, starts=left, goal_sets=tuple(goal_sets))
    _validate_scenario(spec, collision_threshold)
    return spec


def _validate_scenario(spec: ScenarioSpec, collision_threshold: float):
    def check(points, label):
        pts = [np.asarray(p) for p in points]
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                if float(np.linalg.norm(pts[a] - pts[b])) <= collision_threshold:
                    raise ValidationError(f"{label}: positions too close")

    check(spec.starts, "starts")
    for k, gs in enumerate(spec.goal_sets):
        check(gs, f"goal set {k}")
