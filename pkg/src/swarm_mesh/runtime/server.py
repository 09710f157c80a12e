"""Orchestration state machine coordinating episodes and resets."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..errors import ValidationError


class ServerState(enum.Enum):
    WAITING_FOR_AGENTS = "waiting_for_agents"
    RESETTING = "resetting"
    RUNNING = "running"
    EPISODE_DONE = "episode_done"
    FINISHED = "finished"


@dataclass
class StateServer:
    """Tracks heartbeats and drives the per-episode reset/run cycle.

    The experiment layer feeds it heartbeats, placement acks, and the episode
    status each tick; the broadcast it returns carries the operating mode and
    the initial conditions agents should apply.
    """

    n_agents: int
    total_episodes: int
    heartbeat_timeout: float = 3.0
    state: ServerState = ServerState.WAITING_FOR_AGENTS
    episode_index: int = 0
    last_seen: dict = field(default_factory=dict)
    placement_acks: set = field(default_factory=set)
    initial_conditions: tuple | None = None  # (starts, goals) for this episode
    _paused_mid_episode: bool = False
    transitions: list = field(default_factory=list)

    def set_initial_conditions(self, starts, goals) -> None:
        self.initial_conditions = (tuple(starts), tuple(goals))
        self.placement_acks.clear()

    def _fresh(self, now: float) -> bool:
        if len(self.last_seen) < self.n_agents:
            return False
        return all(now - ts <= self.heartbeat_timeout for ts in self.last_seen.values())

    def _goto(self, state: ServerState, now: float) -> None:
        if self.state is not state:
            self.transitions.append((now, self.state, state))
            self.state = state

    def step(self, now: float, heartbeats=(), placement_acks=(), episode_status=None) -> dict:
        """Advance the machine; returns the broadcast for the agents."""
        if self.state is ServerState.FINISHED:
            return self.broadcast(now)
        for agent in heartbeats:
            self.last_seen[agent] = now
        for agent in placement_acks:
            self.placement_acks.add(agent)

        if self.state is ServerState.WAITING_FOR_AGENTS:
            if self._fresh(now):
                if self._paused_mid_episode:
                    self._paused_mid_episode = False
                    self._goto(ServerState.RUNNING, now)
                else:
                    if self.initial_conditions is None:
                        raise ValidationError(
                            "initial conditions must be set before resetting"
                        )
                    self._goto(ServerState.RESETTING, now)
        elif self.state is ServerState.RESETTING:
            if self.placement_acks >= set(range(self.n_agents)):
                self._goto(ServerState.RUNNING, now)
        elif self.state is ServerState.RUNNING:
            if not self._fresh(now):
                self._paused_mid_episode = True
                self._goto(ServerState.WAITING_FOR_AGENTS, now)
            elif episode_status is not None and getattr(episode_status, "terminal", False):
                self._goto(ServerState.EPISODE_DONE, now)
        elif self.state is ServerState.EPISODE_DONE:
            self.episode_index += 1
            if self.episode_index >= self.total_episodes:
                self._goto(ServerState.FINISHED, now)
            else:
                # the experiment layer installs the next (chained) conditions
                self.placement_acks.clear()
                self._goto(ServerState.RESETTING, now)
        return self.broadcast(now)

    def broadcast(self, now: float) -> dict:
        return {
            "state": self.state.value,
            "episode": self.episode_index,
            "initial_conditions": self.initial_conditions,
            "time": now,
        }
