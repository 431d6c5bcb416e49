"""Static analysis of reaction networks.

Covers four questions about a network that need no simulation:

* which species a single reaction can produce from a given species set,
  and the increasing chain of sets that closes under that operator;
* whether a configuration is dense (every present species holds at least
  an ``alpha`` fraction of the total count);
* whether a strictly positive mass assignment makes every reaction
  mass-balanced, certifying that total counts stay bounded;
* the exact set of producible species for small instances, by capped
  breadth-first search over the reachability relation.

Density and mass certificates use exact rational arithmetic throughout;
floating point never decides a feasibility question here.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .model import Configuration, Crn, support


def _as_fraction(x) -> Fraction:
    """Exact value of a user-supplied number.

    Floats are interpreted at decimal precision (their shortest repr), so
    is_alpha_dense(c, 0.1) means the rational 1/10, not the nearest
    binary double.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


# ---------------------------------------------------------------------------
# Production closure and stages


def prod_set(crn: Crn, present: frozenset[int] | set) -> frozenset[int]:
    """Species producible by a single reaction whose reactants all lie in
    ``present`` (reactions with no reactants qualify unconditionally)."""
    present = frozenset(present)
    out = set()
    for rx in crn.reactions:
        if rx.reactant_support() <= present:
            out.update(
                i for i in range(len(rx.products)) if rx.products[i] > rx.reactants[i]
            )
    return frozenset(out)


@dataclass(frozen=True)
class StageDecomposition:
    """The strictly increasing chain of species sets built by repeatedly
    adding everything one more reaction can produce, until it closes.

    ``stages[0]`` is the support of the initial configuration and
    ``stages[m]`` is the closure. ``witnesses`` maps each species added
    after stage 0 to the index of one reaction that produces it from the
    previous stage.
    """

    stages: tuple[frozenset[int], ...]
    witnesses: dict[int, int]

    @property
    def m(self) -> int:
        return len(self.stages) - 1

    @property
    def closure(self) -> frozenset[int]:
        return self.stages[-1]

    def to_dict(self, crn: Crn) -> dict:
        names = crn.species.names
        return {
            "m": self.m,
            "stages": [sorted(names[i] for i in stage) for stage in self.stages],
            "witnesses": {
                names[sid]: crn.reaction_label(ridx)
                for sid, ridx in sorted(self.witnesses.items())
            },
        }


def stage_decomposition(crn: Crn, init: Configuration) -> StageDecomposition:
    """Stage chain starting from the support of ``init``.

    The chain strictly grows until no reaction over the current set
    produces anything new, so its length is less than the species count.
    """
    if init.total == 0:
        raise DomainError("stage decomposition requires a nonzero initial configuration")
    current = support(init)
    stages = [current]
    witnesses: dict[int, int] = {}
    while True:
        produced = prod_set(crn, current)
        new = produced - current
        if not new:
            return StageDecomposition(tuple(stages), witnesses)
        for sid in new:
            for ridx, rx in enumerate(crn.reactions):
                if rx.produces(sid) and rx.reactant_support() <= current:
                    witnesses[sid] = ridx
                    break
        current = current | new
        stages.append(current)


# ---------------------------------------------------------------------------
# Density


def is_alpha_dense(config: Configuration, alpha) -> bool:
    """True iff every present species has count >= alpha * total.

    ``alpha`` must lie in (0, 1]; the comparison is exact.
    """
    alpha = _as_fraction(alpha)
    if not (0 < alpha <= 1):
        raise DomainError("alpha must lie in (0, 1]")
    if config.total == 0:
        raise DomainError("density is undefined for the zero configuration")
    threshold = alpha * config.total
    return all(c >= threshold for c in config.counts.tolist() if c > 0)


# ---------------------------------------------------------------------------
# Mass conservation certificates


@dataclass(frozen=True)
class ConservationCertificate:
    """Strictly positive per-species masses balancing every reaction.

    ``mass`` is normalized so its minimum component is 1; ``ratio`` is the
    maximum component and bounds how much total count can inflate. When no
    such assignment exists, ``mass`` is None.
    """

    mass: tuple[Fraction, ...] | None

    @property
    def exists(self) -> bool:
        return self.mass is not None

    @property
    def ratio(self) -> Fraction | None:
        return max(self.mass) if self.mass else None

    def to_dict(self, crn: Crn) -> dict:
        if self.mass is None:
            return {"exists": False}
        return {
            "exists": True,
            "mass": {n: str(m) for n, m in zip(crn.species.names, self.mass)},
            "ratio": str(self.ratio),
        }


def _simplex_feasible(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Phase-1 simplex over exact rationals.

    Finds u >= 0 with rows * u = rhs, or returns None when infeasible.
    Bland's rule keeps the pivot sequence finite; all arithmetic is exact,
    so degenerate systems cannot be mislabeled.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    # normalize to nonnegative right-hand sides, then add one artificial
    # variable per row and minimize the sum of artificials
    tab = []
    for i in range(m):
        row = list(rows[i])
        b = rhs[i]
        if b < 0:
            row = [-x for x in row]
            b = -b
        tab.append(row + [Fraction(0)] * m + [b])
        tab[i][n + i] = Fraction(1)
    basis = [n + i for i in range(m)]
    # reduced costs for cost vector (0,...,0 | 1,...,1), artificials basic
    red = [-sum(tab[i][j] for i in range(m)) for j in range(n)]
    red += [Fraction(0)] * m
    value = sum(tab[i][-1] for i in range(m))

    while True:
        enter = next((j for j in range(n + m) if red[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise AssertionError("phase-1 objective cannot be unbounded")
        _, leave = best
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * b for a, b in zip(tab[i], tab[leave])]
        f = red[enter]
        if f != 0:
            value += f * tab[leave][-1]
            for j in range(n + m):
                red[j] -= f * tab[leave][j]
        basis[leave] = enter

    if value != 0:  # leftover artificial mass: the system is infeasible
        return None
    u = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            u[var] = tab[i][-1]
    return u


def check_mass_conserving(crn: Crn) -> ConservationCertificate:
    """Search for strictly positive masses with mass . r = mass . p for
    every reaction; exact substitution verifies any certificate before it
    is returned."""
    n = crn.n_species
    if n == 0:
        return ConservationCertificate(())
    rows = []
    rhs = []
    for rx in crn.reactions:
        row = [Fraction(rx.products[i] - rx.reactants[i]) for i in range(n)]
        # substitute mass = 1 + u with u >= 0:  row . u = -row . 1
        rows.append(row)
        rhs.append(-sum(row, Fraction(0)))
    if rows:
        u = _simplex_feasible(rows, rhs)
        if u is None:
            return ConservationCertificate(None)
        mass = [Fraction(1) + x for x in u]
    else:
        mass = [Fraction(1)] * n
    low = min(mass)
    mass = tuple(x / low for x in mass)
    for rx in crn.reactions:  # paranoia: certificates must verify exactly
        lhs = sum(m * r for m, r in zip(mass, rx.reactants))
        rhs_v = sum(m * p for m, p in zip(mass, rx.products))
        if lhs != rhs_v:
            raise AssertionError("internal error: certificate failed verification")
    return ConservationCertificate(mass)


@dataclass(frozen=True)
class FiniteDensityStatus:
    """Sufficient-condition classification of count growth.

    ``population_protocol`` when every reaction has exactly two reactants
    and two products (total count invariant, inflation factor 1);
    ``mass_conserving`` when a conservation certificate exists (inflation
    bounded by its ratio); otherwise ``unknown``.
    """

    kind: str  # "population_protocol" | "mass_conserving" | "unknown"
    c_hat: Fraction | None
    certificate: ConservationCertificate | None = None

    def to_dict(self, crn: Crn) -> dict:
        d = {"kind": self.kind, "c_hat": None if self.c_hat is None else str(self.c_hat)}
        if self.certificate is not None and self.certificate.exists:
            d["certificate"] = self.certificate.to_dict(crn)
        return d


def finite_density_status(crn: Crn) -> FiniteDensityStatus:
    if all(sum(rx.reactants) == 2 and sum(rx.products) == 2 for rx in crn.reactions):
        return FiniteDensityStatus("population_protocol", Fraction(1))
    cert = check_mass_conserving(crn)
    if cert.exists:
        return FiniteDensityStatus("mass_conserving", cert.ratio, cert)
    return FiniteDensityStatus("unknown", None)


# ---------------------------------------------------------------------------
# Exact reachability oracle


@dataclass(frozen=True)
class ReachabilityReport:
    """Result of a capped breadth-first reachability exploration.

    When ``truncated`` is False, ``producible`` is exactly the set of
    species appearing in some reachable configuration; when a cap was hit
    it is a subset of that set.
    """

    producible: frozenset[int]
    visited: int
    truncated: bool
    max_configs: int
    max_count: int

    def to_dict(self, crn: Crn) -> dict:
        return {
            "producible": sorted(crn.species.names[i] for i in self.producible),
            "visited": self.visited,
            "truncated": self.truncated,
            "caps": {"max_configs": self.max_configs, "max_count": self.max_count},
        }


def reachable_set(
    crn: Crn,
    init: Configuration,
    max_configs: int = 100_000,
    max_count: int = 1_000_000,
) -> ReachabilityReport:
    """Breadth-first search of the reachability relation from ``init``.

    Configurations are canonicalized as exact count tuples. The search
    stops cleanly (truncated=True) once ``max_configs`` distinct
    configurations have been visited or a successor would push some count
    beyond ``max_count``.
    """
    if max_configs <= 0 or max_count <= 0:
        raise DomainError("reachability caps must be positive")
    n = crn.n_species
    deltas = []
    needs = []
    for rx in crn.reactions:
        needs.append(rx.reactants)
        deltas.append(tuple(p - r for r, p in zip(rx.reactants, rx.products)))

    start = tuple(init.counts.tolist())
    visited = {start}
    queue = deque([start])
    producible = set(i for i in range(n) if start[i] > 0)
    truncated = False
    while queue:
        cur = queue.popleft()
        for need, delta in zip(needs, deltas):
            if all(c >= r for c, r in zip(cur, need)):
                succ = tuple(c + d for c, d in zip(cur, delta))
                if succ in visited:
                    continue
                if any(c > max_count for c in succ):
                    truncated = True
                    continue
                if len(visited) >= max_configs:
                    truncated = True
                    queue.clear()
                    break
                visited.add(succ)
                queue.append(succ)
                producible.update(i for i in range(n) if succ[i] > 0)
    return ReachabilityReport(frozenset(producible), len(visited), truncated, max_configs, max_count)


@dataclass(frozen=True)
class ScaleComparison:
    scale: int
    producible: frozenset[int]
    is_subset: bool
    equal: bool
    inconclusive: bool


@dataclass(frozen=True)
class ClosureComparison:
    """Per-scale comparison of exact reachability against the stage closure.

    The closure depends only on which species start positive, so scaling
    the initial counts never changes it, while the exactly-producible set
    can only grow with scale. ``least_equal_scale`` is the first scale at
    which the two coincide, if any was found.
    """

    stages: StageDecomposition
    scales: tuple[ScaleComparison, ...]

    @property
    def least_equal_scale(self) -> int | None:
        for sc in self.scales:
            if sc.equal and not sc.inconclusive:
                return sc.scale
        return None

    def to_dict(self, crn: Crn) -> dict:
        names = crn.species.names
        return {
            "closure": sorted(names[i] for i in self.stages.closure),
            "least_equal_scale": self.least_equal_scale,
            "scales": [
                {
                    "scale": sc.scale,
                    "producible": sorted(names[i] for i in sc.producible),
                    "is_subset": sc.is_subset,
                    "equal": sc.equal,
                    "inconclusive": sc.inconclusive,
                }
                for sc in self.scales
            ],
        }


def closure_vs_oracle(
    crn: Crn,
    init: Configuration,
    scale_limit: int,
    max_configs: int = 100_000,
    max_count: int = 1_000_000,
) -> ClosureComparison:
    """Compare BFS-producible sets at initial configurations scaled by
    1..scale_limit against the stage closure. A truncated search marks
    that scale inconclusive (its subset relation still holds, since BFS
    only ever underestimates)."""
    if scale_limit < 1:
        raise DomainError("scale_limit must be at least 1")
    stages = stage_decomposition(crn, init)
    closure = stages.closure
    out = []
    for s in range(1, scale_limit + 1):
        rep = reachable_set(crn, init.scale(s), max_configs, max_count)
        out.append(
            ScaleComparison(
                scale=s,
                producible=rep.producible,
                is_subset=rep.producible <= closure,
                equal=rep.producible == closure and not rep.truncated,
                inconclusive=rep.truncated,
            )
        )
    return ClosureComparison(stages, tuple(out))
