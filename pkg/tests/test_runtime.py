import numpy as np
import pytest

from swarm_mesh.controllers import goal_swap_weights, make_swap_scenario
from swarm_mesh.errors import ValidationError
from swarm_mesh.runtime import (
    EpisodeTrace,
    ExperimentPlan,
    HeartbeatFault,
    ModeConfig,
    ServerState,
    StateServer,
    load_plan,
    nominal_offered_load,
    plan_from_json,
    plan_to_json,
    run_episode,
    run_experiment,
)
from swarm_mesh.runtime.episode import msg_topic
from swarm_mesh.world import CommConfig, EpisodeStatus, WorldConfig

OPEN_WORLD = WorldConfig(wall=None)
INFINITE = CommConfig(rule="infinite")
WEIGHTS = goal_swap_weights()


def swap_plan(mode_name="offboard", preset=None, K=1, episodes=2, n=4, seed=3):
    return ExperimentPlan(
        repetitions=K,
        scenario=make_swap_scenario(n=n, episodes=episodes),
        mode=ModeConfig.default(mode_name, preset_name=preset),
        world=OPEN_WORLD,
        comm=INFINITE,
        seed=seed,
        weights_spec={"handcrafted": "goal-swap"},
    )


class TestModeConfig:
    def test_default_presets(self):
        assert ModeConfig.default("centralized").preset.name == "ideal"
        assert ModeConfig.default("offboard").preset.name == "ideal"
        assert ModeConfig.default("onboard-infra").preset.name == "infra-unicast-r1"
        assert ModeConfig.default("onboard-adhoc").preset.name == "adhoc-multicast-r1"

    def test_centralized_with_adhoc_preset_rejected(self):
        with pytest.raises(ValidationError):
            ModeConfig.default("centralized", preset_name="adhoc-multicast-r1")

    def test_unknown_mode(self):
        with pytest.raises(ValidationError):
            ModeConfig.default("onboard-psychic")

    def test_decentralized_flag(self):
        assert not ModeConfig.default("centralized").decentralized
        assert ModeConfig.default("onboard-adhoc").decentralized


class TestRunEpisode:
    def run(self, mode_name, preset=None, seed=5, n=4, **kw):
        scenario = make_swap_scenario(n=n, episodes=1)
        mode = ModeConfig.default(mode_name, preset_name=preset, **kw)
        return run_episode(
            mode, scenario.starts, scenario.goal_sets[0], WEIGHTS,
            OPEN_WORLD, INFINITE, seed=seed,
        )

    def test_offboard_solves_swap(self):
        trace = self.run("offboard")
        assert trace.status is EpisodeStatus.ALL_AT_GOAL
        assert trace.makespan is not None and trace.makespan <= 10.0

    def test_deterministic_under_lossy_preset(self):
        a = self.run("onboard-adhoc", seed=9)
        b = self.run("onboard-adhoc", seed=9)
        assert a.rows == b.rows
        assert a.status == b.status and a.makespan == b.makespan

    def test_different_seed_changes_lossy_trace(self):
        a = self.run("onboard-adhoc", seed=9)
        b = self.run("onboard-adhoc", seed=10)
        assert a.rows != b.rows

    def test_offboard_ideal_equals_centralized(self):
        a = self.run("centralized", seed=7)
        b = self.run("offboard", seed=7)
        assert len(a.rows) == len(b.rows)
        for ra, rb in zip(a.rows, b.rows):
            assert ra["agent"] == rb["agent"] and ra["t"] == rb["t"]
            np.testing.assert_allclose(ra["v_d"], rb["v_d"], atol=1e-9)
            np.testing.assert_allclose(ra["p"], rb["p"], atol=1e-9)

    def test_immediate_termination_at_goal(self):
        starts = ((0.0, 0.0), (2.0, 0.0))
        trace = run_episode(
            ModeConfig.default("offboard"), starts, starts, WEIGHTS,
            OPEN_WORLD, INFINITE, seed=1,
        )
        assert trace.status is EpisodeStatus.ALL_AT_GOAL
        assert trace.makespan == 0.0
        assert trace.rows == []

    def test_timeout(self):
        world = WorldConfig(wall=None, episode_timeout=0.5)
        starts = ((0.0, 0.0), (2.0, 0.0))
        goals = ((8.0, 8.0), (-8.0, -8.0))  # unreachable in 0.5 s
        trace = run_episode(
            ModeConfig.default("offboard"), starts, goals,
            WEIGHTS, world, INFINITE, seed=1,
        )
        assert trace.status is EpisodeStatus.TIMED_OUT
        assert trace.makespan is None

    def test_mismatched_starts_goals(self):
        with pytest.raises(ValidationError):
            run_episode(
                ModeConfig.default("offboard"), ((0, 0),), ((1, 1), (2, 2)),
                WEIGHTS, OPEN_WORLD, INFINITE, seed=0,
            )

    def test_helpers(self):
        assert msg_topic(3) == "msg/3"
        assert nominal_offered_load(5, 0.1) == pytest.approx(50.0)


class TestTraceIO:
    def test_round_trip(self, tmp_path):
        scenario = make_swap_scenario(n=4, episodes=1)
        trace = run_episode(
            ModeConfig.default("onboard-adhoc"), scenario.starts,
            scenario.goal_sets[0], WEIGHTS, OPEN_WORLD, INFINITE, seed=2,
        )
        path = tmp_path / "trace.ndjson"
        trace.save(path)
        loaded = EpisodeTrace.load(path)
        assert loaded.rows == trace.rows
        assert loaded.status == trace.status
        assert loaded.makespan == trace.makespan
        assert loaded.header["n"] == 4

    def test_truncated_trace_rejected(self, tmp_path):
        scenario = make_swap_scenario(n=4, episodes=1)
        trace = run_episode(
            ModeConfig.default("offboard"), scenario.starts,
            scenario.goal_sets[0], WEIGHTS, OPEN_WORLD, INFINITE, seed=2,
        )
        path = tmp_path / "trace.ndjson"
        trace.save(path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:3] + [lines[-1]]) + "\n")
        with pytest.raises(ValidationError):
            EpisodeTrace.load(path)

    def test_timestamps_strictly_increase(self):
        scenario = make_swap_scenario(n=4, episodes=1)
        trace = run_episode(
            ModeConfig.default("offboard"), scenario.starts,
            scenario.goal_sets[0], WEIGHTS, OPEN_WORLD, INFINITE, seed=2,
        )
        times = list(trace.ticks())
        assert times == sorted(times)
        assert len(set(times)) == len(times)


class TestStateServer:
    def test_normal_cycle(self):
        server = StateServer(n_agents=2, total_episodes=1)
        server.set_initial_conditions(((0, 0), (1, 1)), ((2, 2), (3, 3)))
        server.step(0.0, heartbeats=[0, 1])
        assert server.state is ServerState.RESETTING
        server.step(1.0, heartbeats=[0, 1], placement_acks=[0])
        assert server.state is ServerState.RESETTING  # still missing agent 1
        server.step(2.0, heartbeats=[0, 1], placement_acks=[1])
        assert server.state is ServerState.RUNNING
        server.step(3.0, heartbeats=[0, 1], episode_status=EpisodeStatus.ALL_AT_GOAL)
        assert server.state is ServerState.EPISODE_DONE
        server.step(4.0, heartbeats=[0, 1])
        assert server.state is ServerState.FINISHED

    def test_waits_for_all_heartbeats(self):
        server = StateServer(n_agents=3, total_episodes=1)
        server.set_initial_conditions(((0, 0),) * 3, ((1, 1),) * 3)
        server.step(0.0, heartbeats=[0, 1])
        assert server.state is ServerState.WAITING_FOR_AGENTS

    def test_pause_and_resume_mid_episode(self):
        server = StateServer(n_agents=2, total_episodes=1, heartbeat_timeout=3.0)
        server.set_initial_conditions(((0, 0), (1, 1)), ((2, 2), (3, 3)))
        server.step(0.0, heartbeats=[0, 1])
        server.step(1.0, heartbeats=[0, 1], placement_acks=[0, 1])
        assert server.state is ServerState.RUNNING
        # agent 1 goes quiet past the timeout
        server.step(5.0, heartbeats=[0])
        assert server.state is ServerState.WAITING_FOR_AGENTS
        # on recovery the episode resumes without re-placing
        server.step(6.0, heartbeats=[0, 1])
        assert server.state is ServerState.RUNNING

    def test_running_requires_initial_conditions(self):
        server = StateServer(n_agents=1, total_episodes=1)
        with pytest.raises(ValidationError):
            server.step(0.0, heartbeats=[0])

    def test_finished_is_terminal(self):
        server = StateServer(n_agents=1, total_episodes=1)
        server.set_initial_conditions(((0, 0),), ((1, 1),))
        server.step(0.0, heartbeats=[0])
        server.step(1.0, heartbeats=[0], placement_acks=[0])
        server.step(2.0, heartbeats=[0], episode_status=EpisodeStatus.TIMED_OUT)
        server.step(3.0, heartbeats=[0])
        assert server.state is ServerState.FINISHED
        server.step(4.0, heartbeats=[0], episode_status=EpisodeStatus.ALL_AT_GOAL)
        assert server.state is ServerState.FINISHED

    def test_no_running_before_all_acks(self):
        server = StateServer(n_agents=3, total_episodes=1)
        server.set_initial_conditions(((0, 0),) * 3, ((1, 1),) * 3)
        server.step(0.0, heartbeats=[0, 1, 2])
        for tick in range(5):
            server.step(1.0 + tick, heartbeats=[0, 1, 2], placement_acks=[0, 2])
            assert server.state is ServerState.RESETTING


class TestRunExperiment:
    def test_chained_episodes(self, tmp_path):
        plan = swap_plan(K=1, episodes=2)
        traces = run_experiment(plan, out_dir=tmp_path)
        assert len(traces) == 2
        assert traces[1].header["starts"] == traces[0].header["goals"]
        assert sorted(p.name for p in tmp_path.glob("*.ndjson")) == [
            "trace_0000.ndjson", "trace_0001.ndjson",
        ]

    def test_sweeps_restart_chaining(self):
        plan = swap_plan(K=2, episodes=2)
        traces = run_experiment(plan)
        assert len(traces) == 4
        # sweep 2 restarts from the configured starts
        assert traces[2].header["starts"] == traces[0].header["starts"]

    def test_heartbeat_fault_pauses_and_resumes(self):
        plan = swap_plan(K=1, episodes=2)
        server = StateServer(n_agents=4, total_episodes=2)
        fault = HeartbeatFault(episode=1, agent=0, start=30.0, stop=34.5)
        traces = run_experiment(plan, heartbeat_fault=fault, server=server)
        assert len(traces) == 2
        assert server.state is ServerState.FINISHED
        hops = [(a.value, b.value) for (_, a, b) in server.transitions]
        assert ("running", "waiting_for_agents") in hops
        resumed = [
            i for i, h in enumerate(hops)
            if h == ("waiting_for_agents", "running")
        ]
        assert resumed  # resume path, not a fresh reset

    def test_plan_json_round_trip(self, tmp_path):
        plan = swap_plan(K=2, episodes=3, seed=11)
        doc = plan_to_json(plan)
        plan2 = plan_from_json(doc)
        assert plan2 == plan
        path = tmp_path / "plan.json"
        import json

        path.write_text(json.dumps(doc))
        assert load_plan(path) == plan

    def test_generated_scenario_plans(self):
        doc = {
            "K": 1,
            "mode": "offboard",
            "scenario": {"generator": "swap", "n": 4, "episodes": 2},
            "comm": {"rule": "infinite"},
            "world": {"wall": None},
            "weights": {"handcrafted": "goal-swap"},
        }
        plan = plan_from_json(doc)
        assert plan.total_episodes == 2
        doc["scenario"] = {"generator": "passage", "episodes": 2}
        plan = plan_from_json(doc)
        assert plan.scenario.n == 5

    def test_malformed_plan(self):
        with pytest.raises(ValidationError):
            plan_from_json({"scenario": {"generator": "maze"}})
