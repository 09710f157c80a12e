"""Experiment plans: K sweeps of E goal-chained episodes."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from ..errors import ValidationError
from ..policy import PolicyWeights, load_weights, random_weights
from ..world import CommConfig, ScenarioSpec, Wall, WorldConfig, spawn_scenario
from .episode import run_episode
from .modes import ModeConfig
from .server import ServerState, StateServer
from .trace import EpisodeTrace


@dataclass(frozen=True)
class ExperimentPlan:
    repetitions: int  # K
    scenario: ScenarioSpec  # carries the E goal sets
    mode: ModeConfig
    world: WorldConfig
    comm: CommConfig
    seed: int = 0
    weights_spec: dict = field(default_factory=lambda: {"random_seed": 0})

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValidationError("repetitions (K) must be >= 1")
        if self.scenario.episode_configs < 1:
            raise ValidationError("scenario needs at least one goal set")

    @property
    def episodes_per_sweep(self) -> int:  # E
        return self.scenario.episode_configs

    @property
    def total_episodes(self) -> int:  # K * E
        return self.repetitions * self.episodes_per_sweep

    def resolve_weights(self) -> PolicyWeights:
        spec = self.weights_spec
        if "path" in spec:
            return load_weights(spec["path"])
        if "handcrafted" in spec:
            from ..controllers import goal_swap_weights

            kwargs = spec["handcrafted"]
            if isinstance(kwargs, str):  # bare controller name, e.g. "goal-swap"
                if kwargs != "goal-swap":
                    raise ValidationError(f"unknown handcrafted controller {kwargs!r}")
                kwargs = {}
            return goal_swap_weights(**kwargs)
        return random_weights(int(spec.get("random_seed", 0)))


@dataclass
class HeartbeatFault:
    """Drop one agent's heartbeats during [start, stop) of a given episode."""

    episode: int
    agent: int
    start: float
    stop: float

    def alive(self, episode: int, now: float, agent: int) -> bool:
        return not (
            episode == self.episode
            and agent == self.agent
            and self.start <= now < self.stop
        )


def run_experiment(
    plan: ExperimentPlan,
    out_dir=None,
    heartbeat_fault: HeartbeatFault | None = None,
    server: StateServer | None = None,
) -> list[EpisodeTrace]:
    """Run the whole plan; traces are persisted incrementally when out_dir set.

    Orchestration runs on its own clock: the state server collects
    heartbeats, broadcasts resets, and pauses the episode (without advancing
    sim time) whenever a heartbeat goes stale.
    """
    weights = plan.resolve_weights()
    if server is None:
        server = StateServer(
            n_agents=plan.scenario.n, total_episodes=plan.total_episodes
        )
    traces: list[EpisodeTrace] = []
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)

    now = 0.0
    heartbeat_period = 1.0
    agents = list(range(plan.scenario.n))

    def tick_server(episode, status=None, placement_acks=()):
        nonlocal now
        alive = [
            a for a in agents
            if heartbeat_fault is None or heartbeat_fault.alive(episode, now, a)
        ]
        server.step(now, heartbeats=alive, placement_acks=placement_acks,
                    episode_status=status)
        now += heartbeat_period

    global_episode = 0
    for sweep in range(plan.repetitions):
        previous_goals = None
        for e in range(plan.episodes_per_sweep):
            starts, goals = spawn_scenario(plan.scenario, e, previous_goals)
            server.set_initial_conditions(starts, goals)

            while server.state is ServerState.WAITING_FOR_AGENTS:
                tick_server(global_episode)
            while server.state is ServerState.RESETTING:
                tick_server(global_episode, placement_acks=agents)
            if server.state is not ServerState.RUNNING:
                raise ValidationError(f"unexpected server state {server.state}")

            def tick_hook(tick, t, _episode=global_episode):
                # heartbeat cadence relative to sim ticks; pause if any lost
                tick_server(_episode)
                while server.state is ServerState.WAITING_FOR_AGENTS:
                    tick_server(_episode)

            episode_seed = _episode_seed(plan.seed, sweep, e)
            trace = run_episode(
                plan.mode, starts, goals, weights, plan.world, plan.comm,
                seed=episode_seed, episode_index=global_episode,
                tick_hook=tick_hook,
            )
            server.step(now, heartbeats=agents, episode_status=trace.status)
            if server.state is not ServerState.EPISODE_DONE and server.state is not ServerState.FINISHED:
                raise ValidationError(f"unexpected server state {server.state}")
            server.step(now, heartbeats=agents)  # EPISODE_DONE -> next / finished

            traces.append(trace)
            if out_dir is not None:
                trace.save(os.path.join(out_dir, f"trace_{global_episode:04d}.ndjson"))
            previous_goals = goals
            global_episode += 1

    if server.state is not ServerState.FINISHED:
        raise ValidationError(
            f"server should be finished after {plan.total_episodes} episodes, "
            f"is {server.state}"
        )
    if out_dir is not None:
        with open(os.path.join(out_dir, "plan.json"), "w") as fh:
            json.dump(plan_to_json(plan), fh, indent=2, sort_keys=True)
    return traces


def _episode_seed(base: int, sweep: int, episode: int) -> int:
    from .. import rng

    return rng.hash_u64(base, "episode", sweep, episode) >> 1


# ---------------------------------------------------------------------------
# plan (de)serialization — the `run --plan <file>` schema


def plan_to_json(plan: ExperimentPlan) -> dict:
    w = plan.world
    return {
        "K": plan.repetitions,
        "seed": plan.seed,
        "mode": plan.mode.name,
        "preset": plan.mode.preset.name,
        "aligned": plan.mode.aligned,
        "scenario": {
            "n": plan.scenario.n,
            "starts": [list(p) for p in plan.scenario.starts],
            "goal_sets": [[list(p) for p in gs] for gs in plan.scenario.goal_sets],
            "chaining": plan.scenario.chaining,
        },
        "world": {
            "a_max": w.a_max,
            "v_max": w.v_max,
            "dt": w.dt,
            "wall": None if w.wall is None else {
                "x": w.wall.x, "thickness": w.wall.thickness,
                "gap_center": w.wall.gap_center, "gap_width": w.wall.gap_width,
            },
            "arena_half_extent": w.arena_half_extent,
            "goal_threshold": w.goal_threshold,
            "agent_collision_threshold": w.agent_collision_threshold,
            "agent_radius": w.agent_radius,
            "episode_timeout": w.episode_timeout,
        },
        "comm": {
            "rule": plan.comm.rule, "radius": plan.comm.radius,
            "mean": plan.comm.mean, "stddev": plan.comm.stddev,
            "seed": plan.comm.seed,
        },
        "weights": plan.weights_spec,
    }


def plan_from_json(doc: dict) -> ExperimentPlan:
    try:
        sc = doc["scenario"]
        if "generator" in sc:
            scenario = _generated_scenario(sc)
        else:
            scenario = ScenarioSpec(
                n=int(sc["n"]),
                starts=tuple(tuple(p) for p in sc["starts"]),
                goal_sets=tuple(tuple(tuple(p) for p in gs) for gs in sc["goal_sets"]),
                chaining=bool(sc.get("chaining", True)),
            )
        wd = doc.get("world", {})
        wall_doc = wd.get("wall", "default")
        if wall_doc == "default":
            wall = Wall()
        elif wall_doc is None:
            wall = None
        else:
            wall = Wall(
                x=float(wall_doc.get("x", 0.0)),
                thickness=float(wall_doc.get("thickness", 0.2)),
                gap_center=float(wall_doc.get("gap_center", 0.0)),
                gap_width=float(wall_doc.get("gap_width", 1.0)),
            )
        world = WorldConfig(
            a_max=float(wd.get("a_max", 1.0)),
            v_max=float(wd.get("v_max", 1.0)),
            dt=float(wd.get("dt", 0.1)),
            wall=wall,
            arena_half_extent=float(wd.get("arena_half_extent", 4.0)),
            goal_threshold=float(wd.get("goal_threshold", 0.25)),
            agent_collision_threshold=float(wd.get("agent_collision_threshold", 0.32)),
            agent_radius=float(wd.get("agent_radius", 0.16)),
            episode_timeout=float(wd.get("episode_timeout", 30.0)),
        )
        cd = doc.get("comm", {})
        comm = CommConfig(
            rule=cd.get("rule", "fixed"),
            radius=float(cd.get("radius", 2.0)),
            mean=float(cd.get("mean", 2.0)),
            stddev=float(cd.get("stddev", 0.5)),
            seed=int(cd.get("seed", 0)),
        )
        mode = ModeConfig.default(
            doc.get("mode", "offboard"),
            preset_name=doc.get("preset"),
            aligned=bool(doc.get("aligned", True)),
        )
        return ExperimentPlan(
            repetitions=int(doc.get("K", 1)),
            scenario=scenario,
            mode=mode,
            world=world,
            comm=comm,
            seed=int(doc.get("seed", 0)),
            weights_spec=dict(doc.get("weights", {"random_seed": 0})),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed plan: {exc}") from exc


def _generated_scenario(sc: dict) -> ScenarioSpec:
    kind = sc["generator"]
    if kind == "passage":
        from ..world import make_passage_scenario

        return make_passage_scenario(
            n=int(sc.get("n", 5)),
            episodes=int(sc.get("episodes", 16)),
            seed=int(sc.get("seed", 0)),
            spacing=float(sc.get("spacing", 1.0)),
            offset=float(sc.get("offset", 2.0)),
        )
    if kind == "swap":
        from ..controllers import make_swap_scenario

        return make_swap_scenario(
            n=int(sc.get("n", 5)),
            episodes=int(sc.get("episodes", 8)),
            radius=float(sc.get("radius", 1.5)),
        )
    raise ValidationError(f"unknown scenario generator {kind!r}")


def load_plan(path) -> ExperimentPlan:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON: {exc.msg}") from exc
    return plan_from_json(doc)
