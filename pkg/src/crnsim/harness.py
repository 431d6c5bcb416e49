"""Prebuilt experiments over growing population sizes.

Three scenarios:

* leader election via L + L -> L + N from n candidates, timed against the
  closed form 2(n-1) for the expected time to a single leader;
* the doubling chain (X_i decays, X_i + X_i -> X_{i+1}) where each extra
  stage makes the final species dramatically harder to produce at small n;
* a generic scan measuring, for every species the stage closure adds over
  the initial support, how its first-production time behaves as the
  initial configuration is scaled up. Bounded (non-increasing) medians
  are the signature of constant-time production.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import is_alpha_dense, stage_decomposition
from .errors import DomainError
from .kinetics import (
    FirstProductionStats,
    _Compiled,
    _run_core,
    first_production_times,
    first_production_times_multi,
)
from .model import Configuration, Crn, parse_crn, support
from .parallel import map_ordered
from .streams import substream


def leader_election_crn() -> Crn:
    """The one-reaction network L + L -> L + N with unit rate."""
    crn, _ = parse_crn("L + L -> L + N ; k=1\n")
    return crn


def chain_crn(m: int) -> Crn:
    """The 2m-reaction doubling chain over species X1..X(m+1).

    Every X_i for i <= m decays (X_i -> 0) and merges (X_i + X_i ->
    X_{i+1}), all at unit rate, so reaching X_{m+1} needs 2^m initial
    copies to survive the decays.
    """
    if m < 1:
        raise DomainError("m must be at least 1")
    lines = [f"species: {' '.join(f'X{i}' for i in range(1, m + 2))}"]
    lines += [f"X{i} -> 0 ; k=1" for i in range(1, m + 1)]
    lines += [f"X{i} + X{i} -> X{i + 1} ; k=1" for i in range(1, m + 1)]
    crn, _ = parse_crn("\n".join(lines) + "\n")
    return crn


@dataclass
class LeaderElectionResult:
    """Per-trial times to reach a single leader, plus summary statistics."""

    n: int
    trials: int
    seed: int
    times: np.ndarray
    analytic_mean: float

    @property
    def mean(self) -> float:
        return float(self.times.mean())

    @property
    def ci95_halfwidth(self) -> float:
        """Normal-approximation half width; NaN for a single trial."""
        if self.trials < 2:
            return math.nan
        return 1.96 * float(self.times.std(ddof=1)) / math.sqrt(self.trials)

    def to_dict(self) -> dict:
        hw = self.ci95_halfwidth
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "ci95_halfwidth": None if math.isnan(hw) else hw,
            "analytic_mean": self.analytic_mean,
        }

    def to_csv(self, fileobj):
        w = csv.writer(fileobj)
        w.writerow(["n", "trial", "time"])
        for i, t in enumerate(self.times.tolist()):
            w.writerow([self.n, i, repr(t)])


def leader_election_experiment(
    n: int, trials: int, seed: int, threads: int = 1
) -> LeaderElectionResult:
    """Time until one leader remains, from n candidates in volume n.

    The j-leaders state fires at rate j(j-1)/(2n); summing expected holds
    from j=n down to 2 telescopes to the reference mean 2(n-1).
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    if trials < 1:
        raise DomainError("trials must be at least 1")
    crn = leader_election_crn()
    comp = _Compiled(crn, float(n))
    lid = crn.species.id_of("L")
    base = crn.config({"L": n}).counts.tolist()

    def one(trial: int) -> float:
        t, _, _, _, _, _ = _run_core(
            comp, list(base), substream(seed, trial), count_stop=(lid, 1, -1)
        )
        return t

    times = np.array(map_ordered(one, range(trials), threads))
    return LeaderElectionResult(
        n=n, trials=trials, seed=seed, times=times, analytic_mean=2.0 * (n - 1)
    )


@dataclass
class ChainResult:
    """First-production outcome for the last chain species X_{m+1}."""

    m: int
    n: int
    t_cap: float
    seed: int
    stats: FirstProductionStats

    @property
    def produced_fraction(self) -> float:
        return self.stats.produced_fraction

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "t_cap": self.t_cap,
            "seed": self.seed,
            "produced_fraction": self.produced_fraction,
            "first_production": self.stats.to_dict(),
        }

    def to_csv(self, fileobj):
        w = csv.writer(fileobj)
        w.writerow(["m", "n", "trial", "time_or_censored"])
        for i, t in enumerate(self.stats.times.tolist()):
            w.writerow([self.m, self.n, i, "censored" if math.isnan(t) else repr(t)])


def chain_experiment(
    m: int, n: int, trials: int, t_cap: float, seed: int, threads: int = 1
) -> ChainResult:
    """Produce X_{m+1} from n copies of X1 in volume n, or censor at t_cap."""
    if n < 2:
        raise DomainError("n must be at least 2")
    crn = chain_crn(m)
    init = crn.config({"X1": n})
    stats = first_production_times(
        crn, init, f"X{m + 1}", t_cap, trials, seed, volume=float(n), threads=threads
    )
    return ChainResult(m=m, n=n, t_cap=t_cap, seed=seed, stats=stats)


def scale_configuration(template: Configuration, n: int) -> Configuration:
    """Scale ``template`` to total count n, keeping proportions.

    Counts are floored from exact products; the leftover goes to the
    species with the largest proportion (lowest id on ties).
    """
    total = template.total
    if total == 0:
        raise DomainError("template configuration must be nonzero")
    if n < 1:
        raise DomainError("n must be positive")
    tmpl = template.counts.tolist()
    scaled = [c * n // total for c in tmpl]
    remainder = n - sum(scaled)
    if remainder:
        scaled[max(range(len(tmpl)), key=lambda i: (tmpl[i], -i))] += remainder
    return Configuration(scaled)


@dataclass
class ScanRow:
    n: int
    species: str
    trials: int
    produced_count: int
    median: float
    p90: float
    mean_uncensored: float


@dataclass
class ScanResult:
    """First-production summaries over an n-grid.

    One row per (n, species beyond the initial support); additionally the
    per-n fraction of trials in which every closure species had appeared
    by the time cap.
    """

    crn_digest: str
    alpha: float
    t_cap: float
    seed: int
    n_grid: tuple[int, ...]
    targets: tuple[str, ...]
    rows: list[ScanRow] = field(default_factory=list)
    all_produced_fraction: dict[int, float] = field(default_factory=dict)

    def rows_for(self, species: str) -> list[ScanRow]:
        return [r for r in self.rows if r.species == species]

    def to_dict(self) -> dict:
        return {
            "crn_digest": self.crn_digest,
            "alpha": self.alpha,
            "t_cap": self.t_cap,
            "seed": self.seed,
            "n_grid": list(self.n_grid),
            "targets": list(self.targets),
            "all_produced_fraction": {str(k): v for k, v in self.all_produced_fraction.items()},
            "rows": [
                {
                    "n": r.n,
                    "species": r.species,
                    "trials": r.trials,
                    "produced_count": r.produced_count,
                    "median": r.median if math.isfinite(r.median) else None,
                    "p90": r.p90 if math.isfinite(r.p90) else None,
                    "mean_uncensored": r.mean_uncensored
                    if math.isfinite(r.mean_uncensored)
                    else None,
                }
                for r in self.rows
            ],
        }

    def to_csv(self, fileobj):
        w = csv.writer(fileobj)
        w.writerow(
            ["n", "species", "trials", "produced_count", "median", "p90", "mean_uncensored"]
        )
        for r in self.rows:
            w.writerow(
                [
                    r.n,
                    r.species,
                    r.trials,
                    r.produced_count,
                    repr(r.median) if math.isfinite(r.median) else "censored",
                    repr(r.p90) if math.isfinite(r.p90) else "censored",
                    repr(r.mean_uncensored) if math.isfinite(r.mean_uncensored) else "censored",
                ]
            )


def constant_time_scan(
    crn: Crn,
    init_template: Configuration,
    alpha,
    n_grid,
    trials: int,
    seed: int,
    t_cap: float | None = None,
    threads: int = 1,
) -> ScanResult:
    """First-production behaviour of every closure species across n.

    For each n the template is rescaled (and re-verified alpha-dense, with
    the species support unchanged), each trial runs in volume n watching
    all target species, and the per-species summaries plus the per-n
    all-produced fraction are collected. The time cap defaults to m+1.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    n_grid = [int(n) for n in n_grid]
    if not n_grid:
        raise DomainError("n_grid must be nonempty")
    stages = stage_decomposition(crn, init_template)
    if t_cap is None:
        t_cap = float(stages.m + 1)
    base_support = support(init_template)
    target_ids = sorted(stages.closure - base_support)
    targets = tuple(crn.species.name_of(i) for i in target_ids)

    result = ScanResult(
        crn_digest=crn.digest(),
        alpha=float(alpha),
        t_cap=t_cap,
        seed=seed,
        n_grid=tuple(n_grid),
        targets=targets,
    )
    for gi, n in enumerate(n_grid):
        init_n = scale_configuration(init_template, n)
        if support(init_n) != base_support:
            raise DomainError(
                f"scaling to n={n} changed the species support; n is too small"
            )
        if not is_alpha_dense(init_n, alpha):
            raise DomainError(f"scaled configuration at n={n} is not alpha-dense")
        per_target = first_production_times_multi(
            crn,
            init_n,
            targets,
            t_cap,
            trials,
            seed=seed,
            volume=float(n),
            threads=threads,
            stream_key=(gi,),
        ) if targets else {}
        for name in targets:
            times = per_target[name]
            ok = times[~np.isnan(times)]
            vals = np.where(np.isnan(times), np.inf, times)
            result.rows.append(
                ScanRow(
                    n=n,
                    species=name,
                    trials=trials,
                    produced_count=int(ok.size),
                    median=float(np.quantile(vals, 0.5, method="higher")),
                    p90=float(np.quantile(vals, 0.9, method="higher")),
                    mean_uncensored=float(ok.mean()) if ok.size else math.nan,
                )
            )
        if targets:
            produced_all = np.ones(trials, dtype=bool)
            for name in targets:
                produced_all &= ~np.isnan(per_target[name])
            result.all_produced_fraction[n] = float(produced_all.mean())
        else:
            result.all_produced_fraction[n] = 1.0
    return result


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one prebuilt experiment run.

    ``scenario`` is "leader", "chain" or "scan"; the grid supplies the
    population sizes, ``m`` applies to the chain and ``alpha``/``t_cap``
    to the scan. ``run`` executes every grid cell, writes one CSV plus a
    JSON summary per scenario under ``out_dir``, and returns the summary.
    """

    scenario: str
    n_grid: tuple[int, ...]
    trials: int
    seed: int
    out_dir: str = "."
    m: int = 3
    alpha: float = 1.0
    t_cap: float | None = None

    def __post_init__(self):
        if self.scenario not in ("leader", "chain", "scan"):
            raise DomainError(f"unknown scenario {self.scenario!r}")
        if not self.n_grid:
            raise DomainError("the n grid must be nonempty")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")

    def run(self, crn: Crn | None = None, init: Configuration | None = None,
            threads: int = 1) -> dict:
        out = Path(self.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if self.scenario == "leader":
            summary, rows_writer = {}, []
            for n in self.n_grid:
                res = leader_election_experiment(
                    n, self.trials, seed=self.seed + n, threads=threads
                )
                summary[str(n)] = res.to_dict()
                rows_writer.append(res)
            csv_path = out / "leader.csv"
            with open(csv_path, "w", newline="") as f:
                w = csv.writer(f)
                w.writerow(["n", "trial", "time"])
                for res in rows_writer:
                    for i, t in enumerate(res.times.tolist()):
                        w.writerow([res.n, i, repr(t)])
            report = {"scenario": "leader", "results": summary, "csv": str(csv_path)}
        elif self.scenario == "chain":
            t_cap = float(self.m + 1) if self.t_cap is None else self.t_cap
            results = [
                chain_experiment(self.m, n, self.trials, t_cap,
                                 seed=self.seed + n, threads=threads)
                for n in self.n_grid
            ]
            csv_path = out / f"chain_m{self.m}.csv"
            with open(csv_path, "w", newline="") as f:
                w = csv.writer(f)
                w.writerow(["m", "n", "trial", "time_or_censored"])
                for res in results:
                    for i, t in enumerate(res.stats.times.tolist()):
                        w.writerow(
                            [res.m, res.n, i, "censored" if math.isnan(t) else repr(t)]
                        )
            report = {
                "scenario": "chain",
                "results": {str(r.n): r.to_dict() for r in results},
                "csv": str(csv_path),
            }
        else:
            if crn is None or init is None:
                raise DomainError("the scan scenario needs a network and an init")
            scan = constant_time_scan(
                crn, init, self.alpha, list(self.n_grid), self.trials,
                seed=self.seed, t_cap=self.t_cap, threads=threads,
            )
            csv_path = out / "scan.csv"
            with open(csv_path, "w", newline="") as f:
                scan.to_csv(f)
            report = {"scenario": "scan", "results": scan.to_dict(), "csv": str(csv_path)}
        json_path = csv_path.with_suffix(".json")
        json_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        report["json"] = str(json_path)
        return report
