"""Closed-form tail bounds, the staged-production constant calculus, and
Monte Carlo dominance validation.

Evaluators return base-2 logarithms of probability bounds:

* decay:       Pr[D(t) < delta*N]           < (2*delta*e^(lam*t))^(delta*N-1)
* poisson:     Pr[P(lam) >=/<= n]           <= e^(-lam) * (e*lam/n)^n
* walk:        Pr[U(t) < (1-eps)(f-r)t]     < 2*exp(-eps^2 (f-r)^2 t / (8f))
* reflecting:  Pr[max W over [0,1] < dr*N]  < 2^(-df*N/22 + 1)

``compute_theorem_constants`` chains these into the constants governing
staged production from a dense initial configuration. The delta ladder it
produces is doubly exponentially small in the species count, so every
delta/epsilon value is carried in log2 space; the plain values would
underflow any float almost immediately.

``monte_carlo_validate`` samples the matching process and checks that a
99% Clopper-Pearson upper confidence limit on the empirical tail
frequency stays below the analytic bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.stats import beta as _beta_dist

from . import processes
from .analysis import finite_density_status, stage_decomposition
from .errors import DomainError, HypothesisViolationError
from .model import Configuration, Crn
from .parallel import map_ordered
from .streams import substream

LOG2_E = math.log2(math.e)

# draws per substream chunk in Monte Carlo validation; fixed so that
# results are independent of thread count
_CHUNK = 8192


def log_bound_decay(N: int, lam: float, t: float, delta: float) -> float:
    """log2 of the decay tail bound (2*delta*e^(lam*t))^(delta*N - 1)."""
    if N < 1:
        raise DomainError("N must be a positive integer")
    if not (lam > 0 and t > 0):
        raise DomainError("lam and t must be positive")
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    log2_base = 1.0 + math.log2(delta) + lam * t * LOG2_E
    return (delta * N - 1.0) * log2_base


def log_bound_poisson(lam: float, n: float, side: str) -> float:
    """log2 of e^(-lam) * (e*lam/n)^n.

    ``side`` is "upper" for the right tail Pr[P(lam) >= n] (needs n > lam)
    or "lower" for the left tail Pr[P(lam) <= n] (needs 0 < n < lam).
    """
    if not lam > 0:
        raise DomainError("lam must be positive")
    side = side.lower()
    if side == "upper":
        if not n > lam:
            raise DomainError("upper tail requires n > lam")
    elif side == "lower":
        if not 0 < n < lam:
            raise DomainError("lower tail requires 0 < n < lam")
    else:
        raise DomainError(f"side must be 'upper' or 'lower', got {side!r}")
    return (-lam + n * (1.0 + math.log(lam) - math.log(n))) * LOG2_E


def log_bound_walk(f_hat: float, r_hat: float, t: float, eps_hat: float) -> float:
    """log2 of 2*exp(-eps_hat^2 * (f_hat-r_hat)^2 * t / (8*f_hat))."""
    if not r_hat > 0 or not f_hat > r_hat:
        raise DomainError("requires f_hat > r_hat > 0")
    if not (t > 0 and eps_hat > 0):
        raise DomainError("t and eps_hat must be positive")
    exponent = eps_hat**2 * (f_hat - r_hat) ** 2 * t / (8.0 * f_hat)
    return 1.0 - LOG2_E * exponent


def log_bound_reflecting(delta_f: float, lambda_r: float, delta_r: float, N: int) -> float:
    """log2 of 2^(-delta_f*N/22 + 1) after checking the lemma hypotheses."""
    if not lambda_r >= 1:
        raise HypothesisViolationError(f"requires lambda_r >= 1, got {lambda_r}")
    if not (delta_f > 0 and delta_r > 0):
        raise DomainError("delta_f and delta_r must be positive")
    if not delta_r <= delta_f / (4.0 * lambda_r):
        raise HypothesisViolationError(
            f"requires delta_r <= delta_f/(4*lambda_r) = {delta_f / (4 * lambda_r)}, got {delta_r}"
        )
    if not N >= 6.0 / delta_f:
        raise HypothesisViolationError(f"requires N >= 6/delta_f = {6.0 / delta_f}, got {N}")
    return -delta_f * N / 22.0 + 1.0


# ---------------------------------------------------------------------------
# Constant calculus


@dataclass(frozen=True)
class TheoremConstants:
    """Constants of the staged-production guarantee for one network.

    With K_hat the sum and k_hat the minimum of the rate constants,
    lam = c_hat*K_hat bounds per-unit consumption rates, and
    c = 4*e^(lam*(m+1)) converts decay horizons into survival fractions.
    The ladder starts at delta_0 = alpha/c and contracts through
    delta_{i+1} = k_hat*delta_i^2/(16*lam*c), one rung per stage; stage i
    keeps every stage-i species above delta_i * n for the whole horizon
    t = m+1. The guarantee holds with probability 1 - 2^(-epsilon*n) once
    n clears every threshold in ``n_thresholds``.
    """

    alpha: float
    c_hat_input: float
    c_hat: float
    K_hat: float
    k_hat: float
    lam: float
    m: int
    n_species: int
    log2_c: float
    log2_delta: tuple[float, ...]
    log2_delta_m_lower: float
    log2_epsilon_prime: float
    log2_epsilon: float
    t: float
    n_thresholds: tuple[tuple[str, float], ...]  # (description, log2 of min n)
    warnings: tuple[str, ...]

    @property
    def c(self) -> float:
        """4*e^(lam*(m+1)); may overflow to inf, use log2_c instead."""
        try:
            return 2.0**self.log2_c
        except OverflowError:
            return math.inf

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "c_hat_input": self.c_hat_input,
            "c_hat": self.c_hat,
            "K_hat": self.K_hat,
            "k_hat": self.k_hat,
            "lambda": self.lam,
            "m": self.m,
            "n_species": self.n_species,
            "log2_c": self.log2_c,
            "log2_delta": list(self.log2_delta),
            "log2_delta_m_lower": self.log2_delta_m_lower,
            "log2_epsilon_prime": self.log2_epsilon_prime,
            "log2_epsilon": self.log2_epsilon,
            "t": self.t,
            "n_thresholds": [
                {"description": d, "log2_n_min": v} for d, v in self.n_thresholds
            ],
            "warnings": list(self.warnings),
        }


def compute_theorem_constants(
    crn: Crn,
    init: Configuration,
    alpha: float,
    c_hat: float | None = None,
) -> TheoremConstants:
    """Evaluate the full constant chain for ``crn`` started from the
    support of ``init``.

    ``c_hat`` bounds per-species counts by c_hat*n; when omitted it is
    taken from the finite-density classification (1 for population
    protocols, the certificate ratio for mass-conserving networks) and it
    is an error if neither applies. Whatever the input, c_hat is adjusted
    up to max(c_hat, 1, 1/K_hat) so that lam >= 1 as the reflecting-walk
    bound requires.
    """
    if not crn.reactions:
        raise DomainError("the network must contain at least one reaction")
    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    if init is None:
        raise DomainError(
            "an initial configuration support is required to determine the stages"
        )
    c_hat_input = c_hat
    if c_hat is None:
        status = finite_density_status(crn)
        if status.c_hat is None:
            raise DomainError(
                "count growth is unclassified for this network; pass c_hat explicitly"
            )
        c_hat = float(status.c_hat)
        c_hat_input = c_hat
    if c_hat <= 0:
        raise DomainError("c_hat must be positive")

    K_hat = math.fsum(rx.rate_constant for rx in crn.reactions)
    k_hat = min(rx.rate_constant for rx in crn.reactions)
    c_hat_adj = max(c_hat, 1.0, 1.0 / K_hat)
    lam = c_hat_adj * K_hat

    stages = stage_decomposition(crn, init)
    m = stages.m
    size = crn.n_species

    log2_c = 2.0 + lam * (m + 1) * LOG2_E
    # ladder: log2 delta_{i+1} = 2*log2 delta_i + log2(k_hat/(16*lam*c))
    step_term = math.log2(k_hat) - (4.0 + math.log2(lam) + log2_c)
    ladder = [math.log2(alpha) - log2_c]
    for _ in range(m):
        ladder.append(2.0 * ladder[-1] + step_term)

    # closed-form floor: (alpha*k_hat/(16*lam*c^2))^(2^(size-1))
    log2_base = math.log2(alpha) + math.log2(k_hat) - (4.0 + math.log2(lam) + 2.0 * log2_c)
    log2_delta_m_lower = (2.0 ** (size - 1)) * log2_base

    # epsilon' = (k_hat/88) * (alpha*k_hat / (256*lam*e^(2*lam*size)))^(2^size)
    log2_inner = (
        math.log2(alpha)
        + math.log2(k_hat)
        - (8.0 + math.log2(lam) + 2.0 * lam * size * LOG2_E)
    )
    log2_epsilon_prime = math.log2(k_hat) - math.log2(88.0) + (2.0**size) * log2_inner
    log2_epsilon = log2_epsilon_prime - 1.0

    thresholds = [
        (f"stage {i}: n >= 2/delta_{i}^2", 1.0 - 2.0 * l2d)
        for i, l2d in enumerate(ladder)
    ]
    thresholds.append(
        (
            "union bound: n >= (2 + 2*log2(n_species))/epsilon_prime",
            math.log2(2.0 + 2.0 * math.log2(size)) - log2_epsilon_prime,
        )
    )
    warnings = (
        "the source derivation also states a large-n threshold equal to the "
        "delta_m floor itself, a quantity below 1 and therefore vacuous; its "
        f"reciprocal reading would be log2(n) >= {-log2_delta_m_lower}",
        "the second decay-bound application in the source derivation carries "
        "an extra lam factor in its threshold; the ladder here follows the "
        "definition delta_{i+1} = delta_r / c",
    )

    return TheoremConstants(
        alpha=float(alpha),
        c_hat_input=float(c_hat_input),
        c_hat=float(c_hat_adj),
        K_hat=K_hat,
        k_hat=k_hat,
        lam=lam,
        m=m,
        n_species=size,
        log2_c=log2_c,
        log2_delta=tuple(ladder),
        log2_delta_m_lower=log2_delta_m_lower,
        log2_epsilon_prime=log2_epsilon_prime,
        log2_epsilon=log2_epsilon,
        t=float(m + 1),
        n_thresholds=tuple(thresholds),
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# Monte Carlo dominance validation


@dataclass(frozen=True)
class DecayBoundParams:
    N: int
    lam: float
    t: float
    delta: float


@dataclass(frozen=True)
class PoissonBoundParams:
    lam: float
    n: float
    side: str


@dataclass(frozen=True)
class WalkBoundParams:
    f_hat: float
    r_hat: float
    t: float
    eps_hat: float


@dataclass(frozen=True)
class ReflectingBoundParams:
    delta_f: float
    lambda_r: float
    delta_r: float
    N: int


def clopper_pearson_upper(hits: int, trials: int, confidence: float = 0.99) -> float:
    """One-sided exact upper confidence limit on a binomial proportion."""
    if hits >= trials:
        return 1.0
    return float(_beta_dist.ppf(confidence, hits + 1, trials - hits))


@dataclass(frozen=True)
class BoundReport:
    """Analytic bound vs empirical tail frequency for one parameter point.

    ``verdict`` is "inconclusive" when the analytic bound sits below the
    Monte Carlo resolution 10/trials, otherwise "dominates" when the 99%
    upper confidence limit on the tail probability is at most the bound
    and "violated" when it exceeds it. A bound of 1 or more is flagged
    ``vacuous`` (it dominates trivially).
    """

    target: str
    params: dict
    log2_bound: float
    empirical_hits: int
    trials: int
    upper_confidence: float
    verdict: str
    vacuous: bool

    @property
    def empirical_rate(self) -> float:
        return self.empirical_hits / self.trials

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "params": self.params,
            "log2_bound": self.log2_bound,
            "empirical_hits": self.empirical_hits,
            "trials": self.trials,
            "empirical_rate": self.empirical_rate,
            "upper_confidence": self.upper_confidence,
            "verdict": self.verdict,
            "vacuous": self.vacuous,
        }


def _tail_counter(target: str, params):
    """Returns (log2_bound, fn(rng, size) -> tail hit count)."""
    if target == "decay":
        log2_bound = log_bound_decay(params.N, params.lam, params.t, params.delta)
        proc = processes.DecayParams(params.N, params.lam, params.t)
        thr = params.delta * params.N

        def count(rng, size):
            vals = processes.sample_decay_batch(proc, size, rng)
            return int((vals < thr).sum())

    elif target == "poisson":
        log2_bound = log_bound_poisson(params.lam, params.n, params.side)
        upper = params.side.lower() == "upper"

        def count(rng, size):
            vals = rng.poisson(params.lam, size)
            return int((vals >= params.n).sum() if upper else (vals <= params.n).sum())

    elif target == "walk_z":
        log2_bound = log_bound_walk(params.f_hat, params.r_hat, params.t, params.eps_hat)
        proc = processes.WalkParams(params.f_hat, params.r_hat, params.t)
        thr = (1.0 - params.eps_hat) * (params.f_hat - params.r_hat) * params.t

        def count(rng, size):
            vals = processes.sample_walk_z_batch(proc, size, rng)
            return int((vals < thr).sum())

    elif target == "reflecting":
        log2_bound = log_bound_reflecting(
            params.delta_f, params.lambda_r, params.delta_r, params.N
        )
        # the reflecting bound is stated for the unit horizon
        proc = processes.ReflectingParams(params.N, params.delta_f, params.lambda_r, 1.0)
        thr = params.delta_r * params.N

        def count(rng, size):
            _, vmax = processes.sample_walk_reflecting_batch(proc, size, rng)
            return int((vmax < thr).sum())

    else:
        raise DomainError(
            f"unknown target {target!r}; expected decay, poisson, walk_z or reflecting"
        )
    return log2_bound, count


def monte_carlo_validate(
    target: str,
    params,
    trials: int = 100_000,
    seed: int = 0,
    threads: int = 1,
) -> BoundReport:
    """Estimate the tail probability a bound constrains and compare.

    Draws ``trials`` samples of the target process in fixed-size chunks
    (one substream per chunk, so thread count cannot change the result),
    counts tail events exactly as the bound states them, and classifies
    the outcome per :class:`BoundReport`.
    """
    if trials < 10_000:
        raise DomainError("validation needs at least 10^4 trials")
    target = target.lower()
    log2_bound, count = _tail_counter(target, params)

    chunks = [
        (ci, min(_CHUNK, trials - ci * _CHUNK))
        for ci in range((trials + _CHUNK - 1) // _CHUNK)
    ]

    def one(chunk):
        ci, size = chunk
        return count(substream(seed, ci), size)

    hits = int(sum(map_ordered(one, chunks, threads)))
    upper = clopper_pearson_upper(hits, trials)
    vacuous = log2_bound >= 0.0
    bound_prob = 2.0**log2_bound if log2_bound < 1024 else math.inf
    if bound_prob < 10.0 / trials:
        verdict = "inconclusive"
    elif upper <= bound_prob:
        verdict = "dominates"
    else:
        verdict = "violated"
    return BoundReport(
        target=target,
        params={k: getattr(params, k) for k in params.__dataclass_fields__},
        log2_bound=log2_bound,
        empirical_hits=hits,
        trials=trials,
        upper_confidence=upper,
        verdict=verdict,
        vacuous=vacuous,
    )
