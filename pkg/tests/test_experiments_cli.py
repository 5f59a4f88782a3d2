import subprocess
import sys
from fractions import Fraction as F

import pytest

from schelling.cli import main, parse_fraction, read_trace_csv, write_trace_csv
from schelling.experiments import (ExperimentSpec, derive_seed, emit_plot,
                                   fit_moves_vs_edges, random_initial_placement,
                                   read_rows_csv, run_experiment,
                                   summarize_rows, write_rows_csv)
from schelling.graph import make_toroidal_moore_grid
from schelling.model import Mode
import random


class TestExperimentHarness:
    def test_vacancy_and_type_arithmetic(self):
        g = make_toroidal_moore_grid(10, 10)
        rng = random.Random(0)
        types, p = random_initial_placement(g, 2, F(3, 50), rng)
        assert p.num_agents + p.vacancies == g.n
        assert p.num_agents == 94          # 6% of 100, rounded
        assert types.counts == (47, 47)
        types3, p3 = random_initial_placement(g, 3, F(0), rng)
        assert types3.counts == (34, 33, 33)
        assert max(types3.counts) - min(types3.counts) <= 1

    def test_rows_deterministic(self, tmp_path):
        spec = ExperimentSpec(topologies=("moore",), sides=(6, 8), trials=3,
                              tau=F(1, 4), base_seed=5)
        rows1 = run_experiment(spec)
        rows2 = run_experiment(spec, workers=2)
        assert rows1 == rows2
        f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_rows_csv(rows1, str(f1))
        write_rows_csv(rows2, str(f2))
        assert f1.read_bytes() == f2.read_bytes()

    def test_csv_round_trip(self, tmp_path):
        spec = ExperimentSpec(topologies=("moore",), sides=(6,), trials=2,
                              tau=F(1, 4))
        rows = run_experiment(spec)
        path = tmp_path / "rows.csv"
        write_rows_csv(rows, str(path))
        header = path.read_text().splitlines()[0]
        assert header == "topology,n,m,tau,k,mode,aggregation,seed,moves,rounds,verdict"
        back = read_rows_csv(str(path))
        assert back == rows

    def test_fit_and_summary(self):
        spec = ExperimentSpec(topologies=("moore",), sides=(6, 8, 10), trials=5,
                              tau=F(1, 4))
        rows = run_experiment(spec)
        assert all(r.verdict == "CONVERGED" for r in rows)
        fit = fit_moves_vs_edges(rows, "moore")
        assert len(fit.points) == 3
        summary = summarize_rows(rows)
        assert [s["n"] for s in summary] == [36, 64, 100]
        assert all(s["converged"] == 5 for s in summary)

    def test_jump_spec_validation(self):
        with pytest.raises(ValueError):
            ExperimentSpec(mode=Mode.JUMP, vacancy_frac=F(0), tau=F(1, 4))
        with pytest.raises(ValueError):
            ExperimentSpec(mode=Mode.SWAP, vacancy_frac=F(1, 10), tau=F(1, 4))
        with pytest.raises(ValueError):
            ExperimentSpec(trials=0, tau=F(1, 4))

    def test_derive_seed_stable(self):
        assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2)
        assert derive_seed(1, "a", 2) != derive_seed(2, "a", 2)

    def test_plot_emission(self, tmp_path):
        spec = ExperimentSpec(topologies=("moore",), sides=(6, 8), trials=3,
                              tau=F(1, 4))
        rows = run_experiment(spec)
        out = tmp_path / "plot.svg"
        emit_plot(rows, str(out))
        text = out.read_text()
        assert "<svg" in text
        with pytest.raises(ValueError):
            emit_plot([], str(tmp_path / "empty.svg"))


class TestCli:
    def test_parse_fraction(self):
        assert parse_fraction("1/4") == F(1, 4)
        with pytest.raises(Exception):
            parse_fraction("0.25")

    def test_simulate_moore(self, capsys):
        rc = main(["simulate", "--topology", "moore", "--rows", "8", "--cols", "8",
                   "--tau", "1/4", "--k", "2", "--mode", "swap", "--seed", "1"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "verdict=CONVERGED" in out

    def test_simulate_counterexample_cycles(self, capsys):
        rc = main(["simulate", "--counterexample", "jsg-arbitrary", "--tau", "1/2",
                   "--schedule", "canonical"])
        assert rc == 0
        assert "verdict=CYCLE_DETECTED" in capsys.readouterr().out

    def test_simulate_stable_file(self, tmp_path, capsys):
        graph_file = tmp_path / "g.edgelist"
        graph_file.write_text("6 6\n0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n")
        # two triangles are disconnected; use a single ring instead
        graph_file.write_text("6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n")
        init = tmp_path / "p.placement"
        init.write_text("6 2\n" + "\n".join(
            f"{a} {0 if a < 3 else 1} {a}" for a in range(6)) + "\n")
        rc = main(["simulate", "--graph", str(graph_file), "--initial", str(init),
                   "--tau", "3/5", "--mode", "swap"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "moves=0" in out and "verdict=CONVERGED" in out

    def test_simulate_trace_output(self, tmp_path, capsys):
        trace = tmp_path / "t.csv"
        rc = main(["simulate", "--topology", "moore", "--rows", "8", "--cols", "8",
                   "--tau", "1/4", "--seed", "2", "--with-potential", "ssg",
                   "--out-trace", str(trace),
                   "--out-graph", str(tmp_path / "g.edgelist"),
                   "--out-initial", str(tmp_path / "p0.placement")])
        assert rc == 0
        lines = trace.read_text().splitlines()
        assert lines[0].startswith("step,kind,agent_a,agent_b_or_target")
        assert (tmp_path / "g.edgelist").exists()

    def test_verify_construction_pass(self, capsys):
        rc = main(["verify", "--construction", "ssg-k2", "--tau", "3/5"])
        assert rc == 0
        assert "PASS" in capsys.readouterr().out

    def test_verify_all_constructions(self, capsys):
        for name, tau in [("ssg-1k", "1/2"), ("ssg-11", "1/2"),
                          ("ssg-11-regular", "1/2"), ("jsg-arbitrary", "1/2")]:
            assert main(["verify", "--construction", name, "--tau", tau]) == 0
        assert main(["verify", "--construction", "jsg-regular", "--tau", "1/2",
                     "--delta", "8"]) == 0

    def test_verify_opt_not_stable(self, capsys):
        rc = main(["verify", "--construction", "opt-not-stable", "--tau", "91/100"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "cost(p*)=7" in out and "cost(p)=8" in out and "PASS" in out

    def test_verify_potential_roundtrip(self, tmp_path, capsys):
        # simulate a swap run, dump everything, then verify monotonicity
        gfile, pfile, tfile = (tmp_path / "g.edgelist", tmp_path / "p.placement",
                               tmp_path / "t.csv")
        assert main(["simulate", "--topology", "moore", "--rows", "8", "--cols", "8",
                     "--tau", "1/4", "--seed", "3", "--out-trace", str(tfile),
                     "--out-graph", str(gfile), "--out-initial", str(pfile)]) == 0
        rc = main(["verify", "--potential", "ssg", "--graph", str(gfile),
                   "--initial", str(pfile), "--trace", str(tfile)])
        assert rc == 0
        assert "PASS" in capsys.readouterr().out

    def test_verify_potential_fails_on_cycle(self, tmp_path, capsys):
        # the jump IRC's own trace cannot be monotone for the edge potential
        gfile, pfile, tfile = (tmp_path / "g.edgelist", tmp_path / "p.placement",
                               tmp_path / "t.csv")
        assert main(["simulate", "--counterexample", "jsg-regular", "--delta", "8",
                     "--tau", "1/2", "--schedule", "canonical",
                     "--out-trace", str(tfile), "--out-graph", str(gfile),
                     "--out-initial", str(pfile)]) == 0
        rc = main(["verify", "--potential", "jsg", "--graph", str(gfile),
                   "--initial", str(pfile), "--trace", str(tfile)])
        assert rc == 1
        assert "FAIL" in capsys.readouterr().out

    def test_optimal_rings(self, capsys):
        assert main(["optimal", "--rings", "3,3,4", "--n1", "6", "--tau", "3/5"]) == 0
        assert "SUBSET_SUM_DP 0" in capsys.readouterr().out
        assert main(["optimal", "--rings", "5,5", "--n1", "3", "--tau", "3/5",
                     "--cross-check"]) == 0
        out = capsys.readouterr().out
        assert "AGREE" in out and "SUBSET_SUM_DP 4" in out

    def test_optimal_graph_file(self, tmp_path, capsys):
        from schelling.counterexamples import build_opt_not_stable
        from schelling.graph import save_edge_list
        inst = build_opt_not_stable()
        gfile = tmp_path / "fig.edgelist"
        gfile.write_text(save_edge_list(inst.graph))
        rc = main(["optimal", "--graph", str(gfile), "--counts", "11,11",
                   "--tau", "91/100", "--symmetry",
                   "--out", str(tmp_path / "opt.placement")])
        assert rc == 0
        assert "BRUTE_FORCE 7" in capsys.readouterr().out
        assert (tmp_path / "opt.placement").exists()

    def test_optimal_too_large_exit_code(self, tmp_path):
        from schelling.graph import make_ring_union, save_edge_list
        gfile = tmp_path / "big.edgelist"
        gfile.write_text(save_edge_list(make_ring_union([30, 30])))
        rc = main(["optimal", "--graph", str(gfile), "--counts", "30,30",
                   "--tau", "3/5"])
        assert rc == 3

    def test_experiment_and_plot_cli(self, tmp_path, capsys):
        out_csv = tmp_path / "rows.csv"
        rc = main(["experiment", "--topologies", "moore", "--sides", "6,8",
                   "--tau", "1/4", "--trials", "2", "--out", str(out_csv),
                   "--workers", "1"])
        assert rc == 0
        assert "fit[moore]" in capsys.readouterr().out
        rc = main(["plot", "--csv", str(out_csv), "--out", str(tmp_path / "p.svg")])
        assert rc == 0
        assert (tmp_path / "p.svg").exists()

    def test_usage_error_exit_code(self):
        proc = subprocess.run(
            [sys.executable, "-m", "schelling.cli", "simulate", "--tau", "nonsense"],
            capture_output=True)
        assert proc.returncode == 2

    def test_trace_csv_round_trip(self, tmp_path):
        import random as _r
        from schelling.dynamics import run_ird
        from schelling.model import GameConfig
        g = make_toroidal_moore_grid(6, 6)
        rng = _r.Random(4)
        types, p0 = random_initial_placement(g, 2, F(0), rng)
        tr = run_ird(g, types, p0, GameConfig(F(1, 4)), seed=4)
        path = tmp_path / "t.csv"
        write_trace_csv(str(path), tr)
        back = read_trace_csv(str(path), p0)
        assert [(m.kind, m.agent_a, m.agent_b, m.target) for m in back.moves] == \
               [(m.kind, m.agent_a, m.agent_b, m.target) for m in tr.moves]
