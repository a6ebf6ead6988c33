#!/usr/bin/env python3

"""Module containing the budgeted slice-sequence selection algorithms."""
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence
import logging
import numpy as np
from scipy.optimize import linear_sum_assignment
from biobb_common.tools import file_utils as fu
from biobb_unlearning.s3t.core import (DeletionPrior, InfeasibleMatchingError, InvalidInputError, Permutation,
                                       SamplingExhaustedError, as_prior, check_budget, check_count, make_rng,
                                       permutation_space)

METHODS = ('cyclic', 'bms', 'conditional', 'sorted-cyclic', 'random')
DIVERSE_METHODS = ('cyclic', 'bms', 'sorted-cyclic')
PRIOR_METHODS = ('bms', 'conditional', 'sorted-cyclic')
DEFAULT_HORIZON = 10
MAX_REJECTIONS_PER_SEQUENCE = 1000


@dataclass(frozen=True)
class ScoredSequence:
    perm: Permutation
    score: float


@dataclass(frozen=True)
class SelectionPlan:
    """B distinct slice sequences produced by one selection method."""
    sequences: tuple
    method: str

    def __post_init__(self):
        sequences = tuple(s if isinstance(s, Permutation) else Permutation(tuple(s)) for s in self.sequences)
        if not sequences:
            raise InvalidInputError("a selection plan needs at least one sequence")
        if self.method not in METHODS and self.method != 'explicit':
            raise InvalidInputError(f"unknown selection method {self.method!r}")
        L = len(sequences[0])
        if any(len(s) != L for s in sequences):
            raise InvalidInputError("all sequences of a plan must have the same length")
        if len(set(sequences)) != len(sequences):
            raise InvalidInputError("sequences of a plan must be distinct")
        object.__setattr__(self, 'sequences', sequences)
        if self.method in DIVERSE_METHODS and len(sequences) <= L and not is_position_diverse(sequences):
            raise InvalidInputError(f"{self.method} plan with B <= L must be position-diverse")

    @property
    def L(self) -> int:
        return len(self.sequences[0])

    @property
    def B(self) -> int:
        return len(self.sequences)

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    def to_dict(self, prior: Optional[DeletionPrior] = None, t: int = DEFAULT_HORIZON) -> dict:
        prior = prior or DeletionPrior.uniform(self.L)
        return {'method': self.method, 't': t,
                'sequences': [s.to_list() for s in self.sequences],
                'scores': plan_scores(self, prior, t)}

    @classmethod
    def from_dict(cls, data: dict) -> 'SelectionPlan':
        try:
            return cls(tuple(tuple(s) for s in data['sequences']), data.get('method', 'explicit'))
        except (KeyError, TypeError) as err:
            raise InvalidInputError(f"malformed selection plan: {err}") from err


def rotate_right(perm: Permutation) -> Permutation:
    return Permutation(perm.order[-1:] + perm.order[:-1])


def cyclic_permutations(perm: Permutation) -> list:
    """Returns the L rotations perm, rotate_right(perm), rotate_right^2(perm), ..."""
    rotations = []
    for _ in range(len(perm)):
        rotations.append(perm)
        perm = rotate_right(perm)
    return rotations


def _rotations(values: tuple) -> list:
    rotations = []
    for _ in range(len(values)):
        rotations.append(values)
        values = values[-1:] + values[:-1]
    return rotations


def check_budget_in_space(L: int, B: int) -> int:
    B = check_budget(B)
    if B > permutation_space(L):
        raise InvalidInputError(f"budget exceeds permutation space: B={B} > L!={permutation_space(L)}")
    return B


def iterative_cyclic_rotation(L: int, B: int) -> SelectionPlan:
    """Selects B sequences for a uniform deletion prior.

    Starts from the L rotations of the identity. While more sequences are needed the
    existing ones are visited in insertion order and their suffix after the first
    ``n_iter`` elements is rotated; only unseen sequences are appended.
    """
    L = check_count('L', L)
    B = check_budget_in_space(L, B)
    selected = [p.order for p in cyclic_permutations(Permutation.identity(L))]
    seen = set(selected)
    n_iter = 0
    while len(selected) < B:
        n_iter += 1
        for sequence in list(selected):
            prefix, suffix = sequence[:n_iter], sequence[n_iter:]
            for rotated in _rotations(suffix):
                candidate = prefix + rotated
                if candidate not in seen:
                    seen.add(candidate)
                    selected.append(candidate)
                    if len(selected) == B:
                        break
            if len(selected) >= B:
                break
    return SelectionPlan(tuple(Permutation(s) for s in selected[:B]), 'cyclic')


def _survival_terms(cumulative: np.ndarray, t: int) -> np.ndarray:
    # Rounding can push a prefix sum marginally above 1.
    base = np.clip(1.0 - cumulative, 0.0, 1.0)
    return np.power(base, t)


def prefix_score(prefix: Sequence[int], prior: DeletionPrior, t: int) -> float:
    """Expected number of functioning slices of a partial sequence after t deletions."""
    if t < 0:
        raise InvalidInputError(f"horizon t must be >= 0, got {t}")
    if len(prefix) == 0:
        return 0.0
    cumulative = np.cumsum(prior.as_array()[list(prefix)])
    positions = np.arange(1, len(prefix) + 1)
    return float(np.sum(positions * _survival_terms(cumulative, t)))


def sequence_score(perm: Permutation, prior: DeletionPrior, t: int) -> float:
    prior = as_prior(prior, len(perm))
    return prefix_score(perm.order, prior, t)


def plan_scores(plan, prior: DeletionPrior, t: int) -> list:
    return [sequence_score(perm, prior, t) for perm in plan]


def total_score(plan, prior: DeletionPrior, t: int) -> float:
    return float(sum(plan_scores(plan, prior, t)))


def _solve_assignment(weights: np.ndarray, feasible: np.ndarray):
    cost = np.where(feasible, -weights, np.inf)
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError as err:
        raise InfeasibleMatchingError("infeasible matching") from err
    return cols, float(weights[rows, cols].sum())


def max_weight_perfect_matching(weights, feasible=None) -> tuple:
    """Maximum-weight perfect matching of a square bipartite graph.

    Args:
        weights: L x L edge weights, rows are left vertices.
        feasible: L x L boolean mask of usable edges (all edges when omitted).

    Returns:
        tuple: ``assignment[row] = column``. Among optimal matchings the
        lexicographically smallest assignment vector is returned.
    """
    weights = np.asarray(weights, dtype=float)
    n = weights.shape[0]
    if weights.ndim != 2 or weights.shape[1] != n:
        raise InvalidInputError("weights must be a square matrix")
    mask = np.ones((n, n), dtype=bool) if feasible is None else np.array(feasible, dtype=bool)
    if mask.shape != weights.shape:
        raise InvalidInputError("feasible mask and weights must have the same shape")

    cols, best = _solve_assignment(weights, mask)
    tolerance = 1e-9 * max(1.0, abs(best))
    for row in range(n):
        for col in np.flatnonzero(mask[row]):
            if col >= cols[row]:
                break
            trial = mask.copy()
            trial[row, :] = False
            trial[:, col] = False
            trial[row, col] = True
            try:
                trial_cols, value = _solve_assignment(weights, trial)
            except InfeasibleMatchingError:
                continue
            if value >= best - tolerance:
                cols = trial_cols
                break
        fixed = cols[row]
        mask[row, :] = False
        mask[:, fixed] = False
        mask[row, fixed] = True
    return tuple(int(c) for c in cols)


def _build_level_wise(L: int, weight_fn, first_order: Sequence[int]) -> list:
    sequences = [[int(first)] for first in first_order]
    for level in range(2, L + 1):
        feasible = np.ones((L, L), dtype=bool)
        for row, sequence in enumerate(sequences):
            feasible[row, sequence] = False
        weights = weight_fn(sequences, level)
        assignment = max_weight_perfect_matching(weights, feasible)
        for row, col in enumerate(assignment):
            sequences[row].append(col)
    return sequences


def bms_select(prior: DeletionPrior, t: int, B: int, seed: int = 0,
               out_log: Optional[logging.Logger] = None) -> SelectionPlan:
    """Bipartite-matching based selection of B high-score, position-diverse sequences.

    Sequence ``l`` starts with slice ``l``; at every level the next slice of each
    sequence is chosen by a maximum-weight perfect matching whose edge weights are the
    prefix scores of the extended sequences. The B best completed sequences are
    returned in decreasing score order. Budgets above L are completed with
    :func:`conditional_sample`.
    """
    prior = as_prior(prior)
    L = len(prior)
    B = check_budget_in_space(L, B)
    if t < 0:
        raise InvalidInputError(f"horizon t must be >= 0, got {t}")
    probs = prior.as_array()

    def weight_fn(sequences, level):
        cumulative = np.array([probs[s].sum() for s in sequences])
        base = np.array([prefix_score(s, prior, t) for s in sequences])
        gain = level * _survival_terms(cumulative[:, None] + probs[None, :], t)
        return base[:, None] + gain

    sequences = _build_level_wise(L, weight_fn, range(L))
    scored = [ScoredSequence(Permutation(tuple(s)), prefix_score(s, prior, t)) for s in sequences]
    ranked = sorted(range(L), key=lambda i: -scored[i].score)
    chosen = [scored[i].perm for i in ranked[:min(B, L)]]
    fu.log('BMS selected %d of %d matched sequences (t=%d)' % (len(chosen), L, t), out_log)
    if B > L:
        extra = conditional_sample(prior, B - L, seed, exclude=chosen)
        chosen.extend(extra.sequences)
        fu.log('BMS budget %d > L=%d: %d sequences added by conditional sampling' % (B, L, B - L), out_log)
    return SelectionPlan(tuple(chosen), 'bms')


def conditional_weights(probs: np.ndarray) -> np.ndarray:
    """Sampling weight of each slice: low deletion probability, high weight."""
    return 1.0 - probs


def _sample_sequence(weights: np.ndarray, rng: np.random.Generator) -> tuple:
    remaining = list(range(len(weights)))
    sequence = []
    while remaining:
        w = weights[remaining]
        total = w.sum()
        probs = w / total if total > 0 else np.full(len(remaining), 1.0 / len(remaining))
        pick = remaining.pop(int(rng.choice(len(remaining), p=probs)))
        sequence.append(pick)
    return tuple(sequence)


def conditional_sample(prior: DeletionPrior, B: int, seed: int = 0, exclude: Sequence[Permutation] = ()) -> SelectionPlan:
    """Samples B distinct sequences slice by slice, favouring rarely deleted slices."""
    prior = as_prior(prior)
    L = len(prior)
    B = check_budget(B)
    excluded = {p.order for p in exclude}
    if B > permutation_space(L) - len(excluded):
        raise InvalidInputError(f"budget exceeds permutation space: B={B} > L!={permutation_space(L)}")
    rng = make_rng(seed)
    weights = conditional_weights(prior.as_array())
    selected: list = []
    rejections = 0
    while len(selected) < B:
        candidate = _sample_sequence(weights, rng)
        if candidate in excluded:
            rejections += 1
            if rejections >= MAX_REJECTIONS_PER_SEQUENCE * B:
                raise SamplingExhaustedError(f"sampling exhausted after {rejections} consecutive duplicates")
            continue
        rejections = 0
        excluded.add(candidate)
        selected.append(Permutation(candidate))
    return SelectionPlan(tuple(selected), 'conditional')


def sorted_cyclic_rotation(prior: DeletionPrior, B: int) -> SelectionPlan:
    prior = as_prior(prior)
    L = len(prior)
    B = check_budget(B)
    if B > L:
        raise InvalidInputError(f"sorted-cyclic rotation supports B <= L, got B={B}, L={L}")
    order = np.argsort(prior.as_array(), kind='stable')
    rotations = cyclic_permutations(Permutation(tuple(order)))
    return SelectionPlan(tuple(rotations[:B]), 'sorted-cyclic')


def random_plan(L: int, B: int, seed: int = 0) -> SelectionPlan:
    """B distinct permutations drawn uniformly at random."""
    L = check_count('L', L)
    B = check_budget_in_space(L, B)
    rng = make_rng(seed)
    seen: set = set()
    selected = []
    rejections = 0
    while len(selected) < B:
        candidate = tuple(rng.permutation(L).tolist())
        if candidate in seen:
            rejections += 1
            if rejections >= MAX_REJECTIONS_PER_SEQUENCE * B:
                raise SamplingExhaustedError(f"sampling exhausted after {rejections} consecutive duplicates")
            continue
        rejections = 0
        seen.add(candidate)
        selected.append(Permutation(candidate))
    return SelectionPlan(tuple(selected), 'random')


def random_diverse_plan(L: int, B: int, seed: int = 0) -> SelectionPlan:
    """B <= L position-diverse sequences built from random-weight perfect matchings."""
    L = check_count('L', L)
    B = check_budget(B)
    if B > L:
        raise InvalidInputError(f"a position-diverse plan has at most L={L} sequences, got B={B}")
    rng = make_rng(seed)
    sequences = _build_level_wise(L, lambda sequences, level: rng.random((L, L)), rng.permutation(L).tolist())
    keep = sorted(rng.choice(L, size=B, replace=False).tolist())
    return SelectionPlan(tuple(Permutation(tuple(sequences[i])) for i in keep), 'random')


def positional_distance(a: Permutation, b: Permutation) -> int:
    return sum(1 for x, y in zip(a, b) if x != y)


def is_position_diverse(sequences) -> bool:
    return all(positional_distance(a, b) == len(a) for a, b in combinations(sequences, 2))


def avg_pairwise_diversity(plan) -> float:
    """Mean positional distance over all unordered pairs of sequences of a plan."""
    rows = np.array([list(s) for s in plan])
    if len(rows) < 2:
        raise InvalidInputError("diversity undefined for a plan with fewer than two sequences")
    # Per position, pairs that differ = all pairs - pairs sharing the slice.
    n = len(rows)
    pairs = n * (n - 1) // 2
    differing = 0
    for column in rows.T:
        counts = np.bincount(column)
        differing += pairs - int(np.sum(counts * (counts - 1) // 2))
    return differing / pairs


def select_plan(method: str, L: int, B: int, prior: Optional[DeletionPrior] = None,
                t: int = DEFAULT_HORIZON, seed: int = 0, out_log: Optional[logging.Logger] = None) -> SelectionPlan:
    """Dispatches to the selection algorithm named by ``method``."""
    if method not in METHODS:
        raise InvalidInputError(f"unknown selection method {method!r}, expected one of {METHODS}")
    if method in PRIOR_METHODS and prior is None:
        raise InvalidInputError(f"method {method!r} requires a deletion prior")
    if prior is not None:
        prior = as_prior(prior, L)
    if method == 'cyclic':
        plan = iterative_cyclic_rotation(L, B)
    elif method == 'bms':
        plan = bms_select(prior, t, B, seed, out_log=out_log)
    elif method == 'conditional':
        plan = conditional_sample(prior, B, seed)
    elif method == 'sorted-cyclic':
        plan = sorted_cyclic_rotation(prior, B)
    else:
        plan = random_plan(L, B, seed)
    fu.log('Selected %d sequences of length %d with method %s' % (plan.B, L, method), out_log)
    return plan
