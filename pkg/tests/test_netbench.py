import pytest

from swarm_mesh.errors import ValidationError
from swarm_mesh.netbench import CdfDataset, bench_emulated, bench_real, run_netbench
from swarm_mesh.transport import load_preset


class TestCdfDataset:
    def make(self):
        return CdfDataset(preset="p", rate=60.0, total_records=10, delivered=8,
                          delays=sorted([0.001, 0.002, 0.005, 0.010, 0.015,
                                         0.020, 0.040, 0.080]))

    def test_delivered_fraction(self):
        assert self.make().delivered_fraction == pytest.approx(0.8)

    def test_fraction_within(self):
        ds = self.make()
        assert ds.fraction_within(0.005) == pytest.approx(0.3)
        assert ds.fraction_within(0.020) == pytest.approx(0.6)
        assert ds.fraction_within(10.0) == pytest.approx(0.8)  # bounded by delivery

    def test_points_monotone(self):
        pts = self.make().points()
        fracs = [f for _, f in pts]
        assert fracs == sorted(fracs)
        assert fracs[-1] <= self.make().delivered_fraction + 1e-12

    def test_empty(self):
        ds = CdfDataset(preset="p", rate=1.0, total_records=0, delivered=0)
        assert ds.delivered_fraction == 0.0
        assert ds.fraction_within(1.0) == 0.0

    def test_write_csv(self, tmp_path):
        path = tmp_path / "cdf.csv"
        self.make().write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# schema=")
        assert lines[1] == "delay_ms,fraction"
        assert len(lines) == 2 + 8


class TestBenchEmulated:
    def test_ideal_is_step_at_zero(self):
        ds = bench_emulated(load_preset("ideal"), nodes=3, rate=60.0, messages=90)
        assert ds.delivered_fraction == 1.0
        assert ds.fraction_within(0.0) == 1.0
        # 90 publishes, 2 receivers each
        assert ds.total_records == 180

    def test_lossy_preset_drops_messages(self):
        ds = bench_emulated(load_preset("adhoc-multicast-r1"), nodes=5, rate=60.0,
                            messages=2000, seed=3)
        assert 0.5 < ds.delivered_fraction < 1.0
        assert ds.delays == sorted(ds.delays)

    def test_seed_determinism(self):
        p = load_preset("adhoc-multicast-r1")
        a = bench_emulated(p, nodes=4, rate=60.0, messages=500, seed=8)
        b = bench_emulated(p, nodes=4, rate=60.0, messages=500, seed=8)
        assert a.delays == b.delays and a.total_records == b.total_records

    def test_too_few_nodes(self):
        with pytest.raises(ValidationError):
            bench_emulated(load_preset("ideal"), nodes=1, rate=10.0, messages=10)


class TestBenchReal:
    def test_loopback_short_run(self):
        # generous ack timeout so thread-scheduling jitter cannot fake losses
        ds = bench_real(nodes=2, rate=50.0, duration=0.5, retry_limit=1,
                        ack_timeout=0.05)
        assert ds.total_records > 0
        assert ds.delivered_fraction > 0.9
        assert all(d >= 0 for d in ds.delays)

    def test_too_few_nodes(self):
        with pytest.raises(ValidationError):
            bench_real(nodes=1, rate=10.0, duration=0.1)


class TestRunNetbench:
    def test_sweep_writes_one_file_per_cell(self, tmp_path):
        datasets = run_netbench(
            nodes=3, rates=[30.0, 60.0], presets=["ideal", "adhoc-multicast-r1"],
            backend="emu", duration=1.0, seed=0, out_dir=tmp_path,
        )
        assert len(datasets) == 4
        names = sorted(p.name for p in tmp_path.glob("*.csv"))
        assert names == [
            "cdf_adhoc-multicast-r1_30.csv",
            "cdf_adhoc-multicast-r1_60.csv",
            "cdf_ideal_30.csv",
            "cdf_ideal_60.csv",
        ]

    def test_fractional_rate_filename(self, tmp_path):
        run_netbench(nodes=2, rates=[12.5], presets=["ideal"], backend="emu",
                     duration=1.0, seed=0, out_dir=tmp_path)
        assert (tmp_path / "cdf_ideal_12_5.csv").exists()

    def test_unknown_backend(self):
        with pytest.raises(ValidationError):
            run_netbench(nodes=2, rates=[10.0], presets=["ideal"], backend="quantum")

    def test_unknown_preset(self):
        with pytest.raises(ValidationError):
            run_netbench(nodes=2, rates=[10.0], presets=["nope"], backend="emu")
