import numpy as np
import pytest

from l1sim import (
    AugmentationConfig,
    EngineConfig,
    ReferenceSignal,
    compute_metrics,
    csv_header,
    emit_csv,
    load_csv,
    run_closed_loop,
)
from test_metrics import make_trace


@pytest.fixture
def short_run(bench_uncertain_plant):
    sig = ReferenceSignal(kind="step", onset=0.2, amplitude=1.0)
    trace = run_closed_loop(
        bench_uncertain_plant, AugmentationConfig(law="modified"), sig, EngineConfig(t_end=1.0)
    )
    return trace, sig


class TestSchema:
    def test_header_for_benchmark_dimensions(self):
        assert csv_header(2, 1, 1) == "t,r,y,y_M,u_a,sigma1_1,sigma2_1,x_1,x_2,xhat_1,xhat_2"

    def test_column_count_benchmark(self):
        assert len(csv_header(2, 1, 1).split(",")) == 11

    def test_multi_state_header(self):
        cols = csv_header(3, 1, 2).split(",")
        assert cols == [
            "t", "r", "y", "y_M", "u_a",
            "sigma1_1", "sigma2_1", "sigma2_2",
            "x_1", "x_2", "x_3", "xhat_1", "xhat_2", "xhat_3",
        ]

    def test_three_samples_four_lines(self, tmp_path):
        t = np.array([0.0, 0.1, 0.2])
        trace = make_trace(t, t, t)
        path = emit_csv(trace, tmp_path / "mini.csv")
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 4

    def test_row_width_matches_header(self, tmp_path, short_run):
        trace, _sig = short_run
        path = emit_csv(trace, tmp_path / "run.csv")
        lines = path.read_text().strip().split("\n")
        width = len(lines[0].split(","))
        assert width == 11
        assert all(len(line.split(",")) == width for line in lines[1:])


class TestRoundTrip:
    def test_arrays_bit_exact(self, tmp_path, short_run):
        trace, _sig = short_run
        path = emit_csv(trace, tmp_path / "run.csv")
        back = load_csv(path)
        for name in ("t", "r", "y", "y_m", "u_a", "sigma1", "sigma2", "x", "x_hat", "x_tilde"):
            assert np.array_equal(getattr(trace, name), getattr(back, name)), name

    def test_metrics_preserved(self, tmp_path, short_run):
        trace, sig = short_run
        before = compute_metrics(trace, sig)
        back = load_csv(emit_csv(trace, tmp_path / "run.csv"))
        after = compute_metrics(back, sig)
        for field in (
            "steady_state_error",
            "tracking_error_l2",
            "peak_u_a",
            "overshoot_pct",
            "settling_time_2pct",
            "rise_time_10_90",
            "tracking_lag",
        ):
            a, b = getattr(before, field), getattr(after, field)
            if a is None:
                assert b is None
            else:
                assert abs(a - b) <= 1e-15, field

    def test_17_digit_values_round_trip(self, tmp_path):
        rng = np.random.default_rng(2)
        t = np.arange(5) * 1e-3
        y = rng.standard_normal(5) * np.pi
        trace = make_trace(t, y, y)
        back = load_csv(emit_csv(trace, tmp_path / "digits.csv"))
        assert np.array_equal(back.y, y)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "junk.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="schema"):
            load_csv(path)
