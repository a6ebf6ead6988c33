#!/usr/bin/env python3

"""Module containing the unlearning state machine: model variants, deletions and serving."""
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union
import copy
import logging
from biobb_common.tools import file_utils as fu
from biobb_unlearning.s3t.core import (InvalidInputError, PartitionManifest, Permutation, UnlearningError,
                                       check_budget, check_count, check_shard, check_slice, derive_seed,
                                       shard_priors)
from biobb_unlearning.s3t.selection import DEFAULT_HORIZON, PRIOR_METHODS, SelectionPlan, select_plan

MODES = ('s3t', 'sisa')
FAILURE_PREDICATES = ('all-shards', 'any-shard')
PLAN_SOURCES = ('cyclic', 'bms', 'conditional', 'sorted-cyclic', 'random', 'explicit')
EVENT_VERSION = 1

Target = Union[int, tuple]


@dataclass
class ModelVariant:
    """A model trained on ``perm`` whose first ``active_prefix`` layer groups are switched on."""
    shard: int
    perm: Permutation
    active_prefix: int
    index: int

    @property
    def alive(self) -> bool:
        return self.active_prefix >= 1

    @property
    def prefix(self) -> tuple:
        return self.perm.order[:self.active_prefix]

    def to_dict(self) -> dict:
        return {'index': self.index, 'perm': self.perm.to_list(), 'active_prefix': self.active_prefix}


@dataclass
class ShardState:
    shard: int
    mode: str
    variants: list
    deleted_slices: set = field(default_factory=set)
    remaining_items: Optional[list] = None

    @classmethod
    def from_perms(cls, shard: int, perms: Sequence[Permutation], mode: str = 's3t',
                   remaining_items: Optional[list] = None) -> 'ShardState':
        variants = [ModelVariant(shard, perm, len(perm), index) for index, perm in enumerate(perms)]
        return cls(shard, mode, variants, set(), remaining_items)

    @property
    def alive(self) -> bool:
        return any(v.alive for v in self.variants)

    def alive_prefixes(self) -> list:
        return [v.prefix for v in self.variants if v.alive]

    def deactivate(self, slice_index: int) -> int:
        """Switches off, in every variant, the layers at and after ``slice_index``.

        Returns the number of variants killed by this call.
        """
        newly_dead = 0
        for variant in self.variants:
            position = variant.perm.inverse[slice_index]
            if position < variant.active_prefix:
                variant.active_prefix = position
                if position == 0:
                    newly_dead += 1
        self.deleted_slices.add(slice_index)
        return newly_dead

    def to_dict(self) -> dict:
        return {'shard': self.shard, 'mode': self.mode,
                'deleted_slices': sorted(self.deleted_slices),
                'remaining_items': self.remaining_items,
                'variants': [v.to_dict() for v in self.variants]}

    @classmethod
    def from_dict(cls, data: dict) -> 'ShardState':
        variants = [ModelVariant(int(data['shard']), Permutation(tuple(v['perm'])), int(v['active_prefix']), int(v['index']))
                    for v in data['variants']]
        remaining = data.get('remaining_items')
        return cls(int(data['shard']), data['mode'], variants, set(int(s) for s in data['deleted_slices']),
                   None if remaining is None else [int(c) for c in remaining])


@dataclass(frozen=True)
class DeletionEvent:
    """Audit record of one executed deletion request."""
    request_id: int
    target: Target
    shard: int
    slice: int
    newly_dead_variants: int
    system_alive_after: bool

    def to_dict(self) -> dict:
        target = {'item': self.target} if isinstance(self.target, int) else {'shard': self.target[0], 'slice': self.target[1]}
        return {'version': EVENT_VERSION, 'request_id': self.request_id, 'target': target,
                'shard': self.shard, 'slice': self.slice,
                'newly_dead_variants': self.newly_dead_variants,
                'system_alive_after': self.system_alive_after}

    @classmethod
    def from_dict(cls, data: dict) -> 'DeletionEvent':
        if data.get('version') != EVENT_VERSION:
            raise InvalidInputError(f"unknown event version {data.get('version')!r}")
        return cls(int(data['request_id']), parse_target(data['target']), int(data['shard']), int(data['slice']),
                   int(data['newly_dead_variants']), bool(data['system_alive_after']))


def parse_target(target) -> Target:
    """Normalizes an item id, a (shard, slice) pair or their JSON object forms."""
    if isinstance(target, dict):
        if 'item' in target:
            target = target['item']
        elif 'shard' in target and 'slice' in target:
            target = (target['shard'], target['slice'])
        else:
            raise InvalidInputError(f"unresolvable deletion target {target!r}")
    if isinstance(target, bool):
        raise InvalidInputError(f"unresolvable deletion target {target!r}")
    if isinstance(target, int):
        return target
    if isinstance(target, (list, tuple)) and len(target) == 2:
        return (int(target[0]), int(target[1]))
    raise InvalidInputError(f"unresolvable deletion target {target!r}")


@dataclass
class SystemState:
    """Full ensemble state of the unlearning controller."""
    mode: str
    m: int
    L: int
    B: int
    shards: list
    manifest: Optional[PartitionManifest] = None
    request_count: int = 0
    failure: str = 'all-shards'
    deleted_items: set = field(default_factory=set)

    def copy(self) -> 'SystemState':
        # The manifest is immutable and can be shared.
        return SystemState(self.mode, self.m, self.L, self.B, copy.deepcopy(self.shards), self.manifest,
                           self.request_count, self.failure, set(self.deleted_items))

    def resolve(self, target: Target) -> tuple:
        target = parse_target(target)
        if isinstance(target, int):
            if self.manifest is None:
                raise InvalidInputError("item targets require a partition manifest")
            if target in self.deleted_items:
                raise InvalidInputError(f"item {target} already deleted")
            return self.manifest.locate(target)
        return int(check_shard(target[0], self.m)), int(check_slice(target[1], self.L))

    def apply(self, target: Target) -> DeletionEvent:
        """Executes one deletion request in place and returns its event."""
        target = parse_target(target)
        shard, slice_index = self.resolve(target)
        shard_state = self.shards[shard]
        if isinstance(target, int):
            self.deleted_items.add(target)
            if shard_state.remaining_items is not None:
                shard_state.remaining_items[slice_index] -= 1
        newly_dead = shard_state.deactivate(slice_index)
        self.request_count += 1
        return DeletionEvent(self.request_count, target, shard, slice_index, newly_dead, system_alive(self))

    def best_prefixes(self) -> list:
        best = [best_variant(s) for s in self.shards]
        return [0 if v is None else v.active_prefix for v in best]

    def to_dict(self) -> dict:
        return {'mode': self.mode, 'm': self.m, 'L': self.L, 'B': self.B,
                'failure': self.failure, 'request_count': self.request_count,
                'manifest': None if self.manifest is None else self.manifest.to_dict(),
                'deleted_items': sorted(self.deleted_items),
                'shards': [s.to_dict() for s in self.shards]}

    @classmethod
    def from_dict(cls, data: dict) -> 'SystemState':
        try:
            manifest = None if data.get('manifest') is None else PartitionManifest.from_dict(data['manifest'])
            state = cls(data['mode'], int(data['m']), int(data['L']), int(data['B']),
                        [ShardState.from_dict(s) for s in data['shards']], manifest,
                        int(data['request_count']), data.get('failure', 'all-shards'),
                        set(int(i) for i in data.get('deleted_items', [])))
        except (KeyError, TypeError) as err:
            raise InvalidInputError(f"malformed system state: {err}") from err
        check_exact_unlearning(state)
        return state


def _plan_for_shard(shard: int, L: int, B: int, plan_source: str, priors, plans, t: int, seed: int, out_log) -> SelectionPlan:
    if plan_source == 'explicit':
        plan = plans[shard] if isinstance(plans, (list, tuple)) else plans
        if not isinstance(plan, SelectionPlan):
            plan = SelectionPlan.from_dict(plan) if isinstance(plan, dict) else SelectionPlan(tuple(plan), 'explicit')
        if plan.B != B or plan.L != L:
            raise InvalidInputError(f"explicit plan for shard {shard} must hold B={B} sequences of length L={L}")
        return plan
    prior = priors[shard] if priors is not None else None
    return select_plan(plan_source, L, B, prior, t, derive_seed(seed, shard), out_log=out_log)


def initialize(m: int, L: int, B: int, mode: str = 's3t', plan_source: str = 'cyclic', prior=None,
               manifest: Optional[PartitionManifest] = None, seed: int = 0, plans=None,
               t: int = DEFAULT_HORIZON, failure: str = 'all-shards',
               out_log: Optional[logging.Logger] = None) -> SystemState:
    """Builds the initial ensemble: B fully trained variants per shard.

    Args:
        prior: None, a single DeletionPrior for every shard or one prior per shard.
        plans: explicit SelectionPlan (or one per shard) when ``plan_source='explicit'``.
    """
    m, L, B = check_count('m', m), check_count('L', L), check_budget(B)
    if mode not in MODES:
        raise InvalidInputError(f"unknown mode {mode!r}, expected one of {MODES}")
    if failure not in FAILURE_PREDICATES:
        raise InvalidInputError(f"unknown failure predicate {failure!r}, expected one of {FAILURE_PREDICATES}")
    if plan_source not in PLAN_SOURCES:
        raise InvalidInputError(f"unknown plan source {plan_source!r}, expected one of {PLAN_SOURCES}")
    if mode == 'sisa' and B != 1:
        raise InvalidInputError(f"sisa mode trains a single sequence per shard, got B={B}")
    if plan_source in PRIOR_METHODS and prior is None and mode == 's3t':
        raise InvalidInputError(f"plan source {plan_source!r} requires a deletion prior")
    if plan_source == 'explicit' and plans is None:
        raise InvalidInputError("plan source 'explicit' requires plans")
    if manifest is not None and (manifest.m != m or manifest.L != L):
        raise InvalidInputError(f"manifest shape ({manifest.m}, {manifest.L}) does not match m={m}, L={L}")

    priors = None if prior is None else shard_priors(prior, m, L)
    sizes = manifest.slice_sizes if manifest is not None else None
    shards = []
    for shard in range(m):
        if mode == 'sisa':
            perms = [Permutation.identity(L)]
        else:
            perms = list(_plan_for_shard(shard, L, B, plan_source, priors, plans, t, seed, out_log))
        shards.append(ShardState.from_perms(shard, perms, mode, None if sizes is None else list(sizes[shard])))
    fu.log('Initialized %s system: m=%d, L=%d, B=%d, plans from %s' % (mode, m, L, B, plan_source if mode == 's3t' else 'identity'), out_log)
    return SystemState(mode, m, L, B, shards, manifest, 0, failure)


def apply_deletion(state: SystemState, target: Target) -> tuple:
    """Applies one deletion request to a copy of ``state``.

    Returns:
        tuple: (new SystemState, DeletionEvent).
    """
    new_state = state.copy()
    event = new_state.apply(target)
    return new_state, event


def best_variant(shard_state: ShardState) -> Optional[ModelVariant]:
    """Alive variant with the longest active prefix; the earliest created wins ties."""
    best = None
    for variant in shard_state.variants:
        if variant.alive and (best is None or variant.active_prefix > best.active_prefix):
            best = variant
    return best


def system_alive(state: SystemState) -> bool:
    if state.failure == 'any-shard':
        return all(s.alive for s in state.shards)
    return any(s.alive for s in state.shards)


def sisa_checkpoint_prefix(shard_state: ShardState) -> int:
    """Length of the identity-sequence checkpoint still usable after the deletions so far."""
    if shard_state.mode != 'sisa':
        raise InvalidInputError("sisa_checkpoint_prefix is only defined in sisa mode")
    L = len(shard_state.variants[0].perm)
    return min(shard_state.deleted_slices, default=L)


def check_exact_unlearning(state: SystemState) -> None:
    """Raises if an alive variant still serves a layer trained on a deleted slice."""
    for shard_state in state.shards:
        for variant in shard_state.variants:
            leaked = set(variant.prefix) & shard_state.deleted_slices
            if leaked:
                raise UnlearningError(f"variant {variant.index} of shard {shard_state.shard} still uses deleted slices {sorted(leaked)}")
