import io
import json
import math

import numpy as np
import pytest

from crnsim.errors import DomainError
from crnsim.harness import (
    ExperimentSpec,
    chain_crn,
    chain_experiment,
    constant_time_scan,
    leader_election_crn,
    leader_election_experiment,
    scale_configuration,
)
from crnsim.model import Configuration, parse_crn


class TestBuilders:
    def test_leader_network(self):
        crn = leader_election_crn()
        assert crn.species.names == ("L", "N")
        assert len(crn.reactions) == 1

    def test_chain_network_shape(self):
        crn = chain_crn(3)
        assert crn.species.names == ("X1", "X2", "X3", "X4")
        assert len(crn.reactions) == 6  # m decays + m merges
        rates = {rx.rate_constant for rx in crn.reactions}
        assert rates == {1.0}

    def test_chain_network_roundtrips_through_text(self):
        from crnsim.model import format_crn, parse_crn

        crn = chain_crn(3)
        assert parse_crn(format_crn(crn))[0] == crn


class TestLeaderElection:
    def test_two_candidates_single_exponential(self):
        # one event at rate (1/2)*(2*1/2) = 1/2, so the mean time is 2
        res = leader_election_experiment(n=2, trials=1500, seed=0)
        assert res.analytic_mean == 2.0
        se = 2.0 / math.sqrt(res.trials)  # exponential sd equals its mean
        assert abs(res.mean - 2.0) < 4 * se

    def test_mean_tracks_closed_form(self):
        res = leader_election_experiment(n=100, trials=500, seed=1)
        assert abs(res.mean - res.analytic_mean) / res.analytic_mean < 0.08

    def test_single_trial_degenerates(self):
        res = leader_election_experiment(n=10, trials=1, seed=2)
        assert res.times.size == 1
        assert math.isnan(res.ci95_halfwidth)
        assert res.to_dict()["ci95_halfwidth"] is None

    def test_csv_layout(self):
        res = leader_election_experiment(n=5, trials=3, seed=3)
        buf = io.StringIO()
        res.to_csv(buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "n,trial,time"
        assert len(lines) == 4

    def test_determinism_and_thread_invariance(self):
        a = leader_election_experiment(n=30, trials=40, seed=7)
        b = leader_election_experiment(n=30, trials=40, seed=7, threads=4)
        assert np.array_equal(a.times, b.times)


class TestChain:
    def test_large_n_produces_fast(self):
        res = chain_experiment(m=1, n=1000, trials=200, t_cap=2.0, seed=0)
        assert res.produced_fraction == 1.0
        assert res.stats.median < 0.2

    def test_tiny_n_often_censors(self):
        # from (2, 0): merge rate 1/2 vs decay rate 2, so X2 appears with
        # probability 1/5; afterwards nothing can merge again
        res = chain_experiment(m=1, n=2, trials=600, t_cap=20.0, seed=1)
        assert 0.1 < res.produced_fraction < 0.3

    def test_fraction_nonincreasing_in_m(self):
        fracs = [
            chain_experiment(m=m, n=64, trials=250, t_cap=4.0, seed=2).produced_fraction
            for m in (1, 2, 3)
        ]
        assert all(b <= a + 0.05 for a, b in zip(fracs, fracs[1:]))

    def test_csv_marks_censoring(self):
        res = chain_experiment(m=2, n=4, trials=30, t_cap=0.5, seed=3)
        buf = io.StringIO()
        res.to_csv(buf)
        assert "censored" in buf.getvalue()


class TestScaling:
    def test_exact_scaling_preserves_proportions(self):
        template = Configuration([3, 1])
        scaled = scale_configuration(template, 400)
        assert scaled == Configuration([300, 100])

    def test_remainder_goes_to_largest_species(self):
        template = Configuration([2, 1])
        scaled = scale_configuration(template, 10)
        # floors are (6, 3); the leftover 1 joins the largest proportion
        assert scaled == Configuration([7, 3])
        assert scaled.total == 10

    def test_zero_species_stay_zero(self):
        scaled = scale_configuration(Configuration([5, 0]), 123)
        assert scaled == Configuration([123, 0])

    def test_zero_template_rejected(self):
        with pytest.raises(DomainError):
            scale_configuration(Configuration([0, 0]), 10)


class TestScan:
    def test_conversion_medians_decrease(self):
        crn, _ = parse_crn("X -> Y ; k=1\n")
        res = constant_time_scan(
            crn, crn.config({"X": 10}), alpha=1.0, n_grid=[100, 1000], trials=400, seed=0
        )
        rows = res.rows_for("Y")
        assert [r.n for r in rows] == [100, 1000]
        assert rows[1].median < rows[0].median
        assert res.all_produced_fraction == {100: 1.0, 1000: 1.0}

    def test_single_cell_grid(self):
        crn, _ = parse_crn("X -> Y ; k=1\n")
        res = constant_time_scan(
            crn, crn.config({"X": 4}), alpha=1.0, n_grid=[50], trials=50, seed=1
        )
        assert len(res.rows) == 1
        assert res.rows[0].trials == 50

    def test_leader_scan_target_is_follower_species(self):
        res = constant_time_scan(
            leader_election_crn(),
            Configuration([10, 0]),
            alpha=1.0,
            n_grid=[100, 1000],
            trials=300,
            seed=2,
        )
        assert res.targets == ("N",)
        rows = res.rows_for("N")
        assert rows[1].median <= rows[0].median * 1.1

    def test_default_time_cap_is_m_plus_one(self):
        crn, _ = parse_crn("X -> Y ; k=1\nY -> Z ; k=1\n")
        res = constant_time_scan(
            crn, crn.config({"X": 8}), alpha=1.0, n_grid=[64], trials=20, seed=3
        )
        assert res.t_cap == 3.0  # m = 2

    def test_alpha_density_failure(self):
        crn, _ = parse_crn("A -> B\n")
        template = crn.config({"A": 99, "B": 1})  # B present but very thin
        with pytest.raises(DomainError, match="alpha-dense"):
            constant_time_scan(crn, template, alpha=0.3, n_grid=[100], trials=10, seed=4)

    def test_support_change_rejected(self):
        crn, _ = parse_crn("A -> B\n")
        template = crn.config({"A": 99, "B": 1})
        with pytest.raises(DomainError, match="support"):
            constant_time_scan(crn, template, alpha=0.001, n_grid=[3], trials=10, seed=5)

    def test_deterministic_and_thread_invariant(self):
        crn, _ = parse_crn("X -> Y ; k=1\n")
        init = crn.config({"X": 10})
        a = constant_time_scan(crn, init, 1.0, [50, 100], trials=60, seed=6)
        b = constant_time_scan(crn, init, 1.0, [50, 100], trials=60, seed=6, threads=3)
        assert a.to_dict() == b.to_dict()

    def test_csv_layout(self):
        crn, _ = parse_crn("X -> Y ; k=1\n")
        res = constant_time_scan(crn, crn.config({"X": 5}), 1.0, [20], trials=10, seed=7)
        buf = io.StringIO()
        res.to_csv(buf)
        header = buf.getvalue().splitlines()[0]
        assert header == "n,species,trials,produced_count,median,p90,mean_uncensored"


class TestExperimentSpec:
    def test_validation(self):
        with pytest.raises(DomainError):
            ExperimentSpec(scenario="bogus", n_grid=(10,), trials=5, seed=0)
        with pytest.raises(DomainError):
            ExperimentSpec(scenario="leader", n_grid=(), trials=5, seed=0)
        with pytest.raises(DomainError):
            ExperimentSpec(scenario="leader", n_grid=(10,), trials=0, seed=0)

    def test_leader_grid_run(self, tmp_path):
        spec = ExperimentSpec(
            scenario="leader", n_grid=(5, 10), trials=8, seed=1, out_dir=str(tmp_path)
        )
        report = spec.run()
        assert set(report["results"]) == {"5", "10"}
        rows = (tmp_path / "leader.csv").read_text().strip().splitlines()
        assert len(rows) == 1 + 2 * 8
        assert json.loads((tmp_path / "leader.json").read_text())["scenario"] == "leader"

    def test_chain_defaults_horizon(self, tmp_path):
        spec = ExperimentSpec(
            scenario="chain", n_grid=(32,), trials=5, seed=2, out_dir=str(tmp_path), m=1
        )
        report = spec.run()
        assert report["results"]["32"]["t_cap"] == 2.0

    def test_scan_requires_network(self, tmp_path):
        spec = ExperimentSpec(
            scenario="scan", n_grid=(50,), trials=5, seed=3, out_dir=str(tmp_path)
        )
        with pytest.raises(DomainError):
            spec.run()
        crn, _ = parse_crn("X -> Y ; k=1\n")
        report = spec.run(crn=crn, init=crn.config({"X": 5}))
        assert (tmp_path / "scan.csv").exists()
        assert report["results"]["rows"][0]["n"] == 50
