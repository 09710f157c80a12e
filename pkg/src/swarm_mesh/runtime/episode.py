"""Virtual-clock episode execution for all four modes.

A single logical thread drains a fixed tick schedule; every random draw is
counter-seeded, so a (plan, seed) pair always yields the identical trace.
"""

from __future__ import annotations

import numpy as np

from .. import rng
from ..errors import ValidationError
from ..policy import Message, PolicyWeights, build_observation, encode, evaluate_centralized, evaluate_local
from ..transport import EmuNetwork
from ..world import (
    AgentKinematics,
    CommConfig,
    EpisodeStatus,
    WorldConfig,
    all_at_goal,
    check_termination,
    compute_neighborhood,
    detect_agent_collisions,
    resolve_wall_collision,
    step_dynamics,
)
from .cache import MessageCache
from .modes import ModeConfig
from .trace import EpisodeTrace, make_header


def msg_topic(agent_id: int) -> str:
    return f"msg/{agent_id}"


def nominal_offered_load(n: int, dt: float) -> float:
    """Aggregate published-message rate for an n-agent team at 1/dt Hz."""
    return n / dt


def run_episode(
    mode: ModeConfig,
    starts,
    goals,
    weights: PolicyWeights,
    world_cfg: WorldConfig,
    comm_cfg: CommConfig,
    seed: int,
    episode_index: int = 0,
    tick_hook=None,
) -> EpisodeTrace:
    """Run one episode on the virtual clock and return its trace.

    tick_hook(tick_index, t), when given, runs before each tick; the
    orchestration layer uses it for heartbeats and pause/resume.
    """
    n = len(starts)
    if len(goals) != n:
        raise ValidationError("starts and goals must have the same length")
    dt = world_cfg.dt
    staleness = mode.staleness if mode.staleness is not None else 2.0 * dt
    comm = CommConfig(rule=comm_cfg.rule, radius=comm_cfg.radius, mean=comm_cfg.mean,
                      stddev=comm_cfg.stddev, seed=rng.hash_u64(seed, "comm") >> 1)

    states = [
        AgentKinematics.at_rest(i, starts[i], goals[i], world_cfg.agent_radius)
        for i in range(n)
    ]
    ids = [s.id for s in states]

    net = None
    caches = {}
    endpoints = {}
    if mode.decentralized:
        model = mode.preset.with_seed(rng.hash_u64(seed, "net") >> 1).model
        net = EmuNetwork(model, mode.preset.mode,
                         offered_load=nominal_offered_load(n, dt))
        for i in ids:
            endpoints[i] = net.endpoint(i)
            caches[i] = MessageCache(staleness=staleness)
        for i in ids:
            for j in ids:
                if i != j:
                    endpoints[i].subscribe(msg_topic(j))

    trace = EpisodeTrace(
        header=make_header(episode_index, mode.name, mode.preset.name, seed,
                           n, dt, world_cfg, starts, goals)
    )

    collision_flag = False
    commands = {i: np.zeros(2) for i in ids}
    pending_central: list[tuple[float, list]] = []
    act_seed = rng.hash_u64(seed, "actuation") >> 1

    status = check_termination(states, world_cfg, 0.0, collision_flag)
    if status.terminal:
        makespan = 0.0 if status is EpisodeStatus.ALL_AT_GOAL else None
        trace.finish(status, makespan, collision_flag)
        return trace

    tick = 0
    t = 0.0
    while True:
        if tick_hook is not None:
            tick_hook(tick, t)

        positions = {s.id: s.p for s in states}
        graph = compute_neighborhood(positions, comm, tick)
        received_counts = {i: 0 for i in ids}
        sent_counts = {i: 0 for i in ids}

        if not mode.decentralized:
            obs = [build_observation(s.p, s.v_m, s.p_g) for s in states]
            actions = evaluate_centralized(weights, obs, graph)
            delay = _actuation_delay(mode, act_seed, tick)
            pending_central.append((t + delay, actions))
            while pending_central and pending_central[0][0] <= t:
                _, acts = pending_central.pop(0)
                for i, a in zip(ids, acts):
                    commands[i] = a
        else:
            by_id = {s.id: s for s in states}
            if mode.aligned:
                # phase 1: everyone encodes and publishes this tick's message
                for i in ids:
                    s = by_id[i]
                    z = build_observation(s.p, s.v_m, s.p_g)
                    payload = Message(sender=i, sent_at=t,
                                      payload=encode(weights, z))
                    endpoints[i].publish(msg_topic(i), payload, t)
                    sent_counts[i] += 1
                # phase 2: deliveries due by now reach the caches
                for i in ids:
                    for dg in endpoints[i].poll(t):
                        caches[i].update(dg.payload, t)
                        received_counts[i] += 1
                # phase 3: everyone evaluates on its snapshot
                for i in ids:
                    s = by_id[i]
                    z = build_observation(s.p, s.v_m, s.p_g)
                    neighbors = set(graph.in_neighbors(i))
                    msgs = caches[i].snapshot(t, senders=neighbors)
                    action, _ = evaluate_local(weights, z, msgs)
                    commands[i] = action
            else:
                for i in ids:
                    s = by_id[i]
                    for dg in endpoints[i].poll(t):
                        caches[i].update(dg.payload, t)
                        received_counts[i] += 1
                    z = build_observation(s.p, s.v_m, s.p_g)
                    neighbors = set(graph.in_neighbors(i))
                    msgs = caches[i].snapshot(t, senders=neighbors)
                    action, h_own = evaluate_local(weights, z, msgs)
                    commands[i] = action
                    endpoints[i].publish(
                        msg_topic(i), Message(sender=i, sent_at=t, payload=h_own), t
                    )
                    sent_counts[i] += 1

        # world step
        new_states = []
        wall_hits = set()
        for s in states:
            stepped = step_dynamics(s, commands[s.id], world_cfg)
            resolved, hit = resolve_wall_collision(s, stepped, world_cfg)
            if hit:
                wall_hits.add(s.id)
            new_states.append(resolved)
        pairs = detect_agent_collisions(new_states, world_cfg.agent_collision_threshold)
        if wall_hits or pairs:
            collision_flag = True
        hit_map = {i: set() for i in ids}
        for a, b in pairs:
            hit_map[a].add(b)
            hit_map[b].add(a)

        t_next = t + dt
        for s in new_states:
            trace.add_agent_row(
                t=t_next, agent=s.id, p=s.p, v_m=s.v_m, v_d=s.v_d, a_d=s.a_d,
                neighbors=graph.in_neighbors(s.id),
                sent=sent_counts[s.id], received=received_counts[s.id],
                wall_hit=s.id in wall_hits, agent_hits=hit_map[s.id],
            )

        states = new_states
        t = t_next
        tick += 1
        status = check_termination(states, world_cfg, t, collision_flag)
        if status.terminal:
            break

    makespan = t if status is EpisodeStatus.ALL_AT_GOAL else None
    if status is EpisodeStatus.COLLISION_FLAGGED and all_at_goal(states, world_cfg.goal_threshold):
        # the episode ran to a natural end but is excluded from metrics
        makespan = None
    trace.finish(status, makespan, collision_flag)
    return trace


def _actuation_delay(mode: ModeConfig, act_seed: int, tick: int) -> float:
    """Per-tick action-delivery delay in centralized mode (0 for ideal)."""
    model = mode.preset.model
    if model.delay_median_ms <= 0.0:
        return 0.0
    _, delay_mult = model.multipliers(0.0)
    return rng.lognormal(model.delay_median_ms * delay_mult, model.delay_sigma,
                         act_seed, "act", tick) / 1000.0
