#!/usr/bin/env python3

"""Module containing the domain types shared by the S3T library and the dataset partitioner."""
from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Iterable, Iterator, NewType, Optional
import numpy as np

PRIOR_TOLERANCE = 1e-9
PARTITION_POLICIES = ('round-robin', 'seeded-uniform')

SliceIndex = NewType('SliceIndex', int)
ShardIndex = NewType('ShardIndex', int)


class UnlearningError(Exception):
    """Base class for every error raised by the S3T library."""


class InvalidInputError(UnlearningError, ValueError):
    """A precondition on the arguments of an operation does not hold."""


class InfeasibleMatchingError(UnlearningError):
    """No perfect matching exists within the feasible mask."""


class SamplingExhaustedError(UnlearningError):
    """Rejection sampling could not find a new sequence."""


class SnapshotError(UnlearningError):
    """A snapshot or an event log could not be read or verified."""


class LogDiscontinuityError(SnapshotError):
    """The request ids of an event log do not continue the snapshot."""


def check_slice(value: int, L: int) -> SliceIndex:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or not 0 <= value < L:
        raise InvalidInputError(f"slice index {value!r} out of range [0, {L})")
    return SliceIndex(int(value))


def check_shard(value: int, m: int) -> ShardIndex:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or not 0 <= value < m:
        raise InvalidInputError(f"shard index {value!r} out of range [0, {m})")
    return ShardIndex(int(value))


def check_budget(value: int) -> int:
    """Validates a budget B (number of sequences trained per shard)."""
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise InvalidInputError(f"budget must be a positive integer, got {value!r}")
    return int(value)


def check_count(name: str, value: int, minimum: int = 1) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < minimum:
        raise InvalidInputError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def permutation_space(L: int) -> int:
    return factorial(L)


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Returns a generator for ``seed`` split by ``keys``.

    Derivation goes through :class:`numpy.random.SeedSequence`, so the stream of a
    given (seed, keys) pair never depends on how many other streams were created.
    """
    if seed < 0 or any(k < 0 for k in keys):
        raise InvalidInputError("seeds must be non-negative integers")
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def derive_seed(seed: int, *keys: int) -> int:
    """Integer seed of an independent sub-stream of ``seed`` (see :func:`make_rng`)."""
    if seed < 0 or any(k < 0 for k in keys):
        raise InvalidInputError("seeds must be non-negative integers")
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1)[0])


@dataclass(frozen=True)
class Permutation:
    """An ordering of the slice indices ``0..L-1``."""
    order: tuple

    def __post_init__(self):
        order = tuple(int(v) for v in self.order)
        if sorted(order) != list(range(len(order))) or not order:
            raise InvalidInputError(f"not a permutation of 0..L-1: {list(self.order)}")
        object.__setattr__(self, 'order', order)

    @classmethod
    def identity(cls, L: int) -> 'Permutation':
        return cls(tuple(range(check_count('L', L))))

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self) -> Iterator[int]:
        return iter(self.order)

    def __getitem__(self, item):
        return self.order[item]

    @cached_property
    def inverse(self) -> tuple:
        """Position of every slice in this ordering."""
        positions = [0] * len(self.order)
        for position, slice_index in enumerate(self.order):
            positions[slice_index] = position
        return tuple(positions)

    def position(self, slice_index: int) -> int:
        return self.inverse[slice_index]

    def to_list(self) -> list:
        return list(self.order)


@dataclass(frozen=True)
class DeletionPrior:
    """Per-slice probability that the next deletion request targets that slice."""
    probs: tuple

    def __post_init__(self):
        values = np.asarray(self.probs, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise InvalidInputError("a deletion prior must be a non-empty vector")
        if not np.all(np.isfinite(values)) or np.any(values < 0) or np.any(values > 1 + PRIOR_TOLERANCE):
            raise InvalidInputError(f"prior entries must lie in [0, 1]: {values.tolist()}")
        total = float(values.sum())
        if abs(total - 1.0) > PRIOR_TOLERANCE:
            raise InvalidInputError(f"prior entries must sum to 1, got {total!r}")
        values = np.clip(values / total, 0.0, 1.0)
        object.__setattr__(self, 'probs', tuple(float(v) for v in values))

    @classmethod
    def uniform(cls, L: int) -> 'DeletionPrior':
        return cls(tuple([1.0 / check_count('L', L)] * L))

    @classmethod
    def dirichlet(cls, L: int, alpha: float, seed: int, *keys: int) -> 'DeletionPrior':
        if alpha <= 0:
            raise InvalidInputError(f"dirichlet alpha must be > 0, got {alpha!r}")
        sample = make_rng(seed, *keys).dirichlet([alpha] * check_count('L', L))
        return cls(tuple(sample / sample.sum()))

    def __len__(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def to_list(self) -> list:
        return list(self.probs)


def uniform_prior(L: int) -> DeletionPrior:
    return DeletionPrior.uniform(L)


def dirichlet_prior(L: int, alpha: float = 1.0, seed: int = 0, *keys: int) -> DeletionPrior:
    """Deletion prior drawn from a symmetric Dirichlet(alpha) distribution."""
    return DeletionPrior.dirichlet(L, alpha, seed, *keys)


def as_prior(values, L: Optional[int] = None) -> DeletionPrior:
    prior = values if isinstance(values, DeletionPrior) else DeletionPrior(tuple(values))
    if L is not None and len(prior) != L:
        raise InvalidInputError(f"prior has {len(prior)} entries, expected L={L}")
    return prior


def shard_priors(values, m: int, L: int) -> list:
    """Expands a single prior or a list of m priors into one prior per shard."""
    if values is None:
        return [DeletionPrior.uniform(L)] * m
    if isinstance(values, DeletionPrior):
        return [as_prior(values, L)] * m
    values = list(values)
    if values and isinstance(values[0], (DeletionPrior, list, tuple, np.ndarray)):
        if len(values) != m:
            raise InvalidInputError(f"expected {m} per-shard priors, got {len(values)}")
        return [as_prior(v, L) for v in values]
    return [as_prior(values, L)] * m


@dataclass(frozen=True)
class PartitionManifest:
    """Assignment of every item id to a (shard, slice) pair."""
    n_items: int
    m: int
    L: int
    assignment: tuple

    def __post_init__(self):
        if len(self.assignment) != self.n_items:
            raise InvalidInputError("every item id must appear exactly once in the assignment")
        assignment = tuple((int(check_shard(s, self.m)), int(check_slice(l, self.L))) for s, l in self.assignment)
        object.__setattr__(self, 'assignment', assignment)

    @property
    def slice_sizes(self) -> list:
        sizes = np.zeros((self.m, self.L), dtype=int)
        for shard, slice_index in self.assignment:
            sizes[shard, slice_index] += 1
        return sizes.tolist()

    def locate(self, item_id: int) -> tuple:
        if not isinstance(item_id, (int, np.integer)) or not 0 <= item_id < self.n_items:
            raise InvalidInputError(f"unknown item id {item_id!r}")
        return self.assignment[int(item_id)]

    def to_dict(self) -> dict:
        return {'n_items': self.n_items, 'm': self.m, 'L': self.L,
                'assignment': [[s, l] for s, l in self.assignment]}

    @classmethod
    def from_dict(cls, data: dict) -> 'PartitionManifest':
        try:
            return cls(int(data['n_items']), int(data['m']), int(data['L']),
                       tuple(tuple(pair) for pair in data['assignment']))
        except (KeyError, TypeError) as err:
            raise InvalidInputError(f"malformed partition manifest: {err}") from err


def partition(n_items: int, m: int, L: int, policy: str = 'round-robin', seed: int = 0) -> PartitionManifest:
    """Splits ``n_items`` opaque item ids into m shards of L slices each.

    Both policies fill the m*L slots cyclically, so slice sizes never differ by more
    than one; ``seeded-uniform`` first shuffles the item ids with ``seed``.
    """
    m, L = check_count('m', m), check_count('L', L)
    n_items = check_count('n_items', n_items, 0)
    if n_items < m * L:
        raise InvalidInputError(f"n_items={n_items} is smaller than m*L={m * L}: every slice needs at least one item")
    if policy not in PARTITION_POLICIES:
        raise InvalidInputError(f"unknown partition policy {policy!r}, expected one of {PARTITION_POLICIES}")

    order: Iterable[int] = range(n_items)
    if policy == 'seeded-uniform':
        order = make_rng(seed).permutation(n_items).tolist()

    assignment = [(0, 0)] * n_items
    for slot, item_id in enumerate(order):
        cell = slot % (m * L)
        assignment[item_id] = (cell // L, cell % L)
    return PartitionManifest(n_items, m, L, tuple(assignment))
