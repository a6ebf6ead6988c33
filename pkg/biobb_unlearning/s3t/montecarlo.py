#!/usr/bin/env python3

"""Module containing the Monte Carlo trial runner for deletion rates and retention curves."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterator, Optional, Sequence
import logging
import numpy as np
from biobb_common.tools import file_utils as fu
from biobb_unlearning.s3t import analytics
from biobb_unlearning.s3t.core import (DeletionPrior, InvalidInputError, Permutation, check_budget, check_count,
                                       derive_seed, partition, shard_priors)
from biobb_unlearning.s3t.engine import (FAILURE_PREDICATES, MODES, PLAN_SOURCES, ShardState, SystemState,
                                         best_variant, initialize, system_alive)
from biobb_unlearning.s3t.selection import DEFAULT_HORIZON, select_plan

PRIOR_SPECS = ('uniform', 'dirichlet', 'explicit')
GRANULARITIES = ('slice', 'item')
DEFAULT_TRIALS = 10_000
DEFAULT_MAX_REQUESTS = 10_000_000
REQUEST_CHUNK = 1024
Z95 = 1.959963984540054

# Keys that split the master seed into independent streams.
_PRIOR_STREAM = 0
_MANIFEST_STREAM = 1
_TRIAL_STREAM = 2
_RETENTION_STREAM = 3


@dataclass(frozen=True)
class TrialConfig:
    """Description of one Monte Carlo experiment."""
    m: int
    L: int
    B: int
    mode: str = 's3t'
    plan_source: str = 'cyclic'
    prior_spec: str = 'uniform'
    alpha: float = 1.0
    priors: Optional[tuple] = None
    granularity: str = 'slice'
    n_items: Optional[int] = None
    failure: str = 'all-shards'
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    t: int = DEFAULT_HORIZON
    max_requests: int = DEFAULT_MAX_REQUESTS
    fast_path: bool = True
    label: str = ''

    def __post_init__(self):
        check_count('m', self.m)
        check_count('L', self.L)
        check_budget(self.B)
        check_count('trials', self.trials)
        check_count('seed', self.seed, 0)
        if self.mode not in MODES:
            raise InvalidInputError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.mode == 'sisa' and self.B != 1:
            raise InvalidInputError(f"sisa mode trains a single sequence per shard, got B={self.B}")
        if self.plan_source not in PLAN_SOURCES or self.plan_source == 'explicit':
            raise InvalidInputError(f"unsupported plan source {self.plan_source!r} for simulation")
        if self.prior_spec not in PRIOR_SPECS:
            raise InvalidInputError(f"unknown prior spec {self.prior_spec!r}, expected one of {PRIOR_SPECS}")
        if self.prior_spec == 'dirichlet' and not self.alpha > 0:
            raise InvalidInputError(f"dirichlet alpha must be > 0, got {self.alpha!r}")
        if self.prior_spec == 'explicit' and self.priors is None:
            raise InvalidInputError("prior spec 'explicit' requires priors")
        if self.granularity not in GRANULARITIES:
            raise InvalidInputError(f"unknown granularity {self.granularity!r}, expected one of {GRANULARITIES}")
        if self.granularity == 'item' and (self.n_items is None or self.n_items < self.m * self.L):
            raise InvalidInputError("item granularity requires n_items >= m*L")
        if self.failure not in FAILURE_PREDICATES:
            raise InvalidInputError(f"unknown failure predicate {self.failure!r}, expected one of {FAILURE_PREDICATES}")
        if self.priors is not None:
            object.__setattr__(self, 'priors', tuple(tuple(float(p) for p in v) for v in _as_vectors(self.priors)))

    @property
    def name(self) -> str:
        return self.label or f"{self.mode}-{self.plan_source if self.mode == 's3t' else 'identity'}-m{self.m}-L{self.L}-B{self.B}"

    def resolve_priors(self) -> list:
        """One deletion prior per shard, fixed for the whole experiment."""
        if self.prior_spec == 'uniform':
            return [DeletionPrior.uniform(self.L)] * self.m
        if self.prior_spec == 'dirichlet':
            return [DeletionPrior.dirichlet(self.L, self.alpha, self.seed, _PRIOR_STREAM, shard) for shard in range(self.m)]
        return shard_priors([list(v) for v in self.priors], self.m, self.L)

    def to_dict(self) -> dict:
        data = asdict(self)
        data['priors'] = None if self.priors is None else [list(v) for v in self.priors]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'TrialConfig':
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown trial configuration fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as err:
            raise InvalidInputError(f"incomplete trial configuration: {err}") from err


def _as_vectors(priors) -> list:
    priors = list(priors)
    if priors and not isinstance(priors[0], (list, tuple, np.ndarray)):
        return [priors]
    return priors


@dataclass(frozen=True)
class TrialOutcome:
    deletions_to_failure: int
    censored: bool = False
    best_prefix_trace: tuple = ()


@dataclass
class TrialResult:
    """Aggregate of the per-trial deletion counts of one configuration."""
    config: TrialConfig
    deletions_to_failure: list
    mean: float
    ci95_halfwidth: Optional[float]
    bound: float
    censored: int = 0
    retention_trace: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, config: TrialConfig, counts: Sequence[int], censored: int = 0) -> 'TrialResult':
        values = np.asarray(counts, dtype=float)
        mean = float(values.mean())
        halfwidth = None
        if len(values) > 1:
            halfwidth = float(Z95 * values.std(ddof=1) / np.sqrt(len(values)))
        bound = analytics.s3t_deletion_bound(config.m, config.L, config.B)
        return cls(config, [int(c) for c in counts], mean, halfwidth, bound, censored)

    def to_dict(self, include_counts: bool = False) -> dict:
        data = {'config': self.config.to_dict(), 'name': self.config.name, 'trials': len(self.deletions_to_failure),
                'mean': self.mean, 'ci95': self.ci95_halfwidth, 'bound': self.bound, 'censored': self.censored}
        if self.retention_trace:
            data['retention'] = [{'k': k, 'r': r, 'empirical': p} for (k, r), p in sorted(self.retention_trace.items())]
        if include_counts:
            data['deletions_to_failure'] = self.deletions_to_failure
        return data


@dataclass(frozen=True)
class RetentionRow:
    point: analytics.RetentionPoint
    empirical: float
    stderr: float
    trials: int

    def to_dict(self) -> dict:
        return {**self.point.to_dict(), 'empirical': self.empirical, 'stderr': self.stderr, 'trials': self.trials}


def _trial_streams(config: TrialConfig, trial_seed: int, stream: int = _TRIAL_STREAM) -> tuple:
    sequence = np.random.SeedSequence([config.seed, stream, trial_seed])
    plan_sequence, request_sequence = sequence.spawn(2)
    return int(plan_sequence.generate_state(1)[0]), np.random.default_rng(request_sequence)


def _pair_probabilities(config: TrialConfig) -> Optional[np.ndarray]:
    if config.prior_spec == 'uniform':
        return None
    probs = np.concatenate([p.as_array() for p in config.resolve_priors()]) / config.m
    return probs / probs.sum()


def _request_stream(rng: np.random.Generator, n_pairs: int, pair_probs: Optional[np.ndarray]) -> Iterator[np.ndarray]:
    """Endless chunks of (shard*L + slice) request codes, drawn with replacement."""
    while True:
        if pair_probs is None:
            yield rng.integers(0, n_pairs, size=REQUEST_CHUNK)
        else:
            yield rng.choice(n_pairs, size=REQUEST_CHUNK, p=pair_probs)


def _initial_state(config: TrialConfig, plan_seed: int) -> SystemState:
    manifest = None
    if config.granularity == 'item':
        manifest = partition(config.n_items, config.m, config.L, 'seeded-uniform', derive_seed(config.seed, _MANIFEST_STREAM))
    prior = None if config.prior_spec == 'uniform' and config.plan_source in ('cyclic', 'random') else config.resolve_priors()
    return initialize(config.m, config.L, config.B, config.mode, config.plan_source, prior, manifest,
                      plan_seed, t=config.t, failure=config.failure)


class _StateCache:
    """Initial states keyed by plan seed; deterministic plan sources share one state."""

    def __init__(self, config: TrialConfig):
        self.config = config
        self.shared = config.mode == 'sisa' or config.plan_source in ('cyclic', 'sorted-cyclic', 'bms')
        self.pair_probs = _pair_probabilities(config)
        self._state: Optional[SystemState] = None
        self._critical: Optional[list] = None

    def critical_pairs(self, plan_seed: int) -> list:
        if not self.shared:
            return _critical_pairs(self.get(plan_seed))
        if self._critical is None:
            self._critical = _critical_pairs(self.get(self.config.seed))
        return self._critical

    def get(self, plan_seed: int) -> SystemState:
        if not self.shared:
            return _initial_state(self.config, plan_seed)
        if self._state is None:
            self._state = _initial_state(self.config, self.config.seed)
        return self._state.copy()


def run_trial(config: TrialConfig, trial_seed: int, cache: Optional[_StateCache] = None,
              trace: bool = False) -> TrialOutcome:
    """Drives the engine with sampled deletion requests until the system fails.

    With ``trace`` the best prefix of every shard is recorded after each request.
    """
    plan_seed, rng = _trial_streams(config, trial_seed)
    cache = cache or _StateCache(config)
    state = cache.get(plan_seed)
    prefixes: list = []
    if config.granularity == 'item':
        for item_id in rng.permutation(config.n_items).tolist():
            state.apply(item_id)
            if trace:
                prefixes.append(tuple(state.best_prefixes()))
            if not system_alive(state):
                return TrialOutcome(state.request_count, False, tuple(prefixes))
        return TrialOutcome(state.request_count, True, tuple(prefixes))

    L = config.L
    for chunk in _request_stream(rng, config.m * L, cache.pair_probs):
        for code in chunk.tolist():
            state.apply((code // L, code % L))
            if trace:
                prefixes.append(tuple(state.best_prefixes()))
            if not system_alive(state):
                return TrialOutcome(state.request_count, False, tuple(prefixes))
            if state.request_count >= config.max_requests:
                return TrialOutcome(state.request_count, True, tuple(prefixes))


def _critical_pairs(state: SystemState) -> list:
    """Per shard, the request codes that kill a variant (the first slice of each variant)."""
    return [sorted({s.shard * state.L + v.perm[0] for v in s.variants}) for s in state.shards]


def fast_trial(config: TrialConfig, trial_seed: int, cache: Optional[_StateCache] = None) -> TrialOutcome:
    """Same outcome as :func:`run_trial` in slice mode without stepping the engine.

    A variant dies exactly when its first slice is hit, so the failure time follows
    from the first hit of every critical (shard, slice) pair in the same request
    stream.
    """
    if config.granularity != 'slice':
        raise InvalidInputError("the fast path only supports slice granularity")
    plan_seed, rng = _trial_streams(config, trial_seed)
    cache = cache or _StateCache(config)
    per_shard = cache.critical_pairs(plan_seed)
    codes = [code for shard_codes in per_shard for code in shard_codes]
    owner = np.repeat(np.arange(config.m), [len(c) for c in per_shard])
    lookup = np.full(config.m * config.L, -1, dtype=np.int64)
    lookup[codes] = np.arange(len(codes))
    hit = np.full(len(codes), -1, dtype=np.int64)

    offset = 0
    for chunk in _request_stream(rng, config.m * config.L, cache.pair_probs):
        ids = lookup[chunk]
        where = np.flatnonzero(ids >= 0)
        unique, first = np.unique(ids[where], return_index=True)
        fresh = hit[unique] < 0
        hit[unique[fresh]] = offset + where[first[fresh]] + 1
        finished = [hit[owner == shard].min() >= 0 for shard in range(config.m)]
        completion = [hit[owner == shard].max() for shard in range(config.m)]
        if config.failure == 'all-shards' and all(finished):
            failure_time = int(max(completion))
        elif config.failure == 'any-shard' and any(finished):
            failure_time = int(min(c for c, done in zip(completion, finished) if done))
        else:
            failure_time = None
        offset += REQUEST_CHUNK
        if failure_time is not None and failure_time <= config.max_requests:
            return TrialOutcome(failure_time)
        if offset >= config.max_requests:
            return TrialOutcome(config.max_requests, True)


def _trial_block(config: TrialConfig, start: int, stop: int) -> list:
    cache = _StateCache(config)
    runner = fast_trial if config.fast_path and config.granularity == 'slice' else run_trial
    return [runner(config, index, cache) for index in range(start, stop)]


def _blocks(trials: int, jobs: int) -> list:
    size = max(1, -(-trials // (jobs * 10)))
    return [(start, min(start + size, trials)) for start in range(0, trials, size)]


def estimate_deletion_rate(config: TrialConfig, jobs: int = 1, out_log: Optional[logging.Logger] = None,
                           ks: Optional[Sequence[int]] = None, rs: Optional[Sequence[int]] = None) -> TrialResult:
    """Runs ``config.trials`` independent trials and aggregates their deletion counts.

    When ``ks`` and ``rs`` are given the single-shard retention of the same
    configuration is estimated too and stored in ``retention_trace``.

    Trial i always consumes the stream derived from (seed, i), and blocks are
    reassembled in trial order, so the result does not depend on ``jobs``.
    """
    jobs = check_count('jobs', jobs)
    fu.log('Simulating %s: %d trials, %d job(s)' % (config.name, config.trials, jobs), out_log)
    outcomes: list = []
    blocks = _blocks(config.trials, jobs)
    step = max(1, len(blocks) // 10)
    if jobs == 1:
        for number, (start, stop) in enumerate(blocks, 1):
            outcomes.extend(_trial_block(config, start, stop))
            if number % step == 0:
                fu.log('  %s: %d/%d trials done' % (config.name, stop, config.trials), out_log)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(_trial_block, config, start, stop) for start, stop in blocks]
            for number, (future, (_, stop)) in enumerate(zip(futures, blocks), 1):
                outcomes.extend(future.result())
                if number % step == 0:
                    fu.log('  %s: %d/%d trials done' % (config.name, stop, config.trials), out_log)
    censored = sum(1 for o in outcomes if o.censored)
    if censored:
        fu.log('WARNING: %d trial(s) of %s reached max_requests=%d before failing' % (censored, config.name, config.max_requests), out_log)
    result = TrialResult.from_counts(config, [o.deletions_to_failure for o in outcomes], censored)
    fu.log('%s: mean %.4f deletions (bound %.4f)' % (config.name, result.mean, result.bound), out_log)
    if ks and rs:
        rows = retention_curve(config, ks, rs, out_log)
        result.retention_trace = {(row.point.k, row.point.r): row.empirical for row in rows}
    return result


class _RetentionSetup:
    """Prior and, for deterministic plan sources, the plan shared by every retention trial."""

    def __init__(self, config: TrialConfig):
        self.config = config
        self.prior = config.resolve_priors()[0]
        self.probs = None if config.prior_spec == 'uniform' else self.prior.as_array()
        self.perms = None
        if config.mode == 'sisa':
            self.perms = [Permutation.identity(config.L)]
        elif config.plan_source in ('cyclic', 'sorted-cyclic', 'bms'):
            self.perms = list(select_plan(config.plan_source, config.L, config.B, self.prior, config.t, config.seed))

    def shard(self, plan_seed: int, rng: np.random.Generator) -> ShardState:
        config = self.config
        if self.perms is not None:
            perms = self.perms
        elif config.plan_source == 'random':
            # Independent uniform sequences per trial, duplicates allowed.
            perms = [Permutation(tuple(rng.permutation(config.L).tolist())) for _ in range(config.B)]
        else:
            perms = list(select_plan(config.plan_source, config.L, config.B, self.prior, config.t, plan_seed))
        return ShardState.from_perms(0, perms, config.mode)


def run_retention_trial(config: TrialConfig, trial_seed: int, r_max: int,
                        setup: Optional[_RetentionSetup] = None) -> list:
    """Best prefix of a single shard after 0..r_max deletions of its slices."""
    setup = setup or _RetentionSetup(config)
    plan_seed, rng = _trial_streams(config, trial_seed, _RETENTION_STREAM)
    shard = setup.shard(plan_seed, rng)
    if setup.probs is None:
        draws = rng.integers(0, config.L, size=r_max)
    else:
        draws = rng.choice(config.L, size=r_max, p=setup.probs)
    trace = [best_variant(shard).active_prefix]
    for slice_index in draws.tolist():
        shard.deactivate(slice_index)
        best = best_variant(shard)
        trace.append(0 if best is None else best.active_prefix)
    return trace


def retention_curve(config: TrialConfig, ks: Sequence[int], rs: Sequence[int],
                    out_log: Optional[logging.Logger] = None) -> list:
    """Empirical P[best prefix >= k after r deletions] next to the closed forms."""
    ks = [int(k) for k in ks]
    rs = [check_count('r', int(r), 0) for r in rs]
    for k in ks:
        if not 1 <= k <= config.L:
            raise InvalidInputError(f"prefix length k must lie in [1, L={config.L}], got {k}")
    r_max = max(rs, default=0)
    setup = _RetentionSetup(config)
    traces = np.array([run_retention_trial(config, index, r_max, setup) for index in range(config.trials)])
    fu.log('Retention of %s over %d trials, k=%s, r=%s' % (config.name, config.trials, ks, rs), out_log)
    rows = []
    for k in ks:
        for r in rs:
            survived = traces[:, r] >= k
            empirical = float(survived.mean())
            stderr = float(np.sqrt(empirical * (1 - empirical) / config.trials))
            rows.append(RetentionRow(analytics.retention_point(k, config.L, r, config.B), empirical, stderr, config.trials))
    return rows


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    mean: float
    ci95: Optional[float]
    bound: float
    ratio: float
    result: TrialResult

    def to_dict(self) -> dict:
        return {'name': self.name, 'config': self.result.config.to_dict(), 'mean': self.mean, 'ci95': self.ci95,
                'bound': self.bound, 'ratio': self.ratio}


def compare(configs: Sequence[TrialConfig], jobs: int = 1, out_log: Optional[logging.Logger] = None) -> list:
    """Side-by-side deletion rates; ``ratio`` is relative to the first configuration."""
    if not configs:
        raise InvalidInputError("compare needs at least one configuration")
    shapes = {(c.m, c.L) for c in configs}
    if len(shapes) > 1:
        fu.log('WARNING: compared configurations do not share (m, L): %s' % sorted(shapes), out_log)
    results = [estimate_deletion_rate(c, jobs, out_log) for c in configs]
    baseline = results[0].mean
    return [ComparisonRow(r.config.name, r.mean, r.ci95_halfwidth, r.bound, r.mean / baseline, r) for r in results]
