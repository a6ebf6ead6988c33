# type: ignore
import math
import pytest
from biobb_unlearning.s3t.core import (DeletionPrior, InvalidInputError, Permutation, UnlearningError, dirichlet_prior, make_rng,
                                       partition)
from biobb_unlearning.s3t.engine import (DeletionEvent, ShardState, SystemState, apply_deletion, best_variant,
                                         check_exact_unlearning, initialize, sisa_checkpoint_prefix, system_alive)
from biobb_unlearning.s3t.registry import append_event, canonical_json, replay, save_snapshot, state_bytes
from biobb_unlearning.s3t.selection import SelectionPlan


def prefixes(shard_state):
    return [list(p) for p in shard_state.alive_prefixes()]


class TestInitialize():
    def test_workflow_plans(self):
        state = initialize(3, 4, 4)
        for shard in state.shards:
            assert [v.perm.to_list() for v in shard.variants] == [[0, 1, 2, 3], [3, 0, 1, 2], [2, 3, 0, 1], [1, 2, 3, 0]]
            assert all(v.active_prefix == 4 for v in shard.variants)

    def test_sisa(self):
        state = initialize(1, 1, 1, mode='sisa')
        assert len(state.shards[0].variants) == 1
        assert state.shards[0].variants[0].active_prefix == 1

    def test_sisa_budget(self):
        with pytest.raises(InvalidInputError):
            initialize(2, 4, 2, mode='sisa')

    def test_prior_required(self):
        with pytest.raises(InvalidInputError, match='requires a deletion prior'):
            initialize(2, 4, 2, plan_source='bms')

    def test_explicit_plan_shape(self):
        plan = SelectionPlan(((0, 1, 2),), 'explicit')
        with pytest.raises(InvalidInputError):
            initialize(2, 3, 2, plan_source='explicit', plans=plan)

    def test_seeded(self):
        first = initialize(3, 5, 4, plan_source='random', seed=9)
        second = initialize(3, 5, 4, plan_source='random', seed=9)
        assert state_bytes(first) == state_bytes(second)

    def test_manifest_shape(self):
        with pytest.raises(InvalidInputError):
            initialize(2, 4, 1, manifest=partition(30, 3, 4))


class TestDeletion():
    def test_workflow_example(self):
        state = initialize(3, 4, 4)
        state, event = apply_deletion(state, (2, 0))
        assert prefixes(state.shards[2]) == [[3], [2, 3], [1, 2, 3]]
        assert best_variant(state.shards[2]).prefix == (1, 2, 3)
        assert event.newly_dead_variants == 1
        state, event = apply_deletion(state, (2, 1))
        assert prefixes(state.shards[2]) == [[3], [2, 3]]
        assert best_variant(state.shards[2]).prefix == (2, 3)
        assert state.request_count == 2

    def test_other_shards_untouched(self):
        before = initialize(3, 4, 4)
        after, _ = apply_deletion(before, (2, 0))
        assert after.shards[0].to_dict() == before.shards[0].to_dict()
        assert after.shards[1].to_dict() == before.shards[1].to_dict()
        assert before.request_count == 0

    def test_repeated_slice(self):
        state, _ = apply_deletion(initialize(1, 4, 4), (0, 2))
        again, event = apply_deletion(state, (0, 2))
        assert event.newly_dead_variants == 0
        assert again.shards[0].to_dict()['variants'] == state.shards[0].to_dict()['variants']

    def test_item_targets(self):
        manifest = partition(24, 2, 3, 'round-robin')
        state = initialize(2, 3, 3, manifest=manifest)
        shard, slice_index = manifest.locate(5)
        state, event = apply_deletion(state, 5)
        assert (event.shard, event.slice) == (shard, slice_index)
        assert state.shards[shard].remaining_items[slice_index] == manifest.slice_sizes[shard][slice_index] - 1
        assert slice_index in state.shards[shard].deleted_slices
        with pytest.raises(InvalidInputError, match='already deleted'):
            apply_deletion(state, 5)
        with pytest.raises(InvalidInputError):
            apply_deletion(state, 24)

    def test_item_without_manifest(self):
        with pytest.raises(InvalidInputError, match='manifest'):
            apply_deletion(initialize(1, 3, 1), 0)

    @pytest.mark.parametrize('target', [(0, 4), (3, 0), 'slice', True, (0, 1, 2)])
    def test_unresolvable(self, target):
        with pytest.raises(InvalidInputError):
            apply_deletion(initialize(2, 4, 1), target)

    def test_event_round_trip(self):
        _, event = apply_deletion(initialize(2, 4, 2), {'shard': 1, 'slice': 3})
        assert DeletionEvent.from_dict(event.to_dict()) == event
        data = event.to_dict()
        data['version'] = 2
        with pytest.raises(InvalidInputError):
            DeletionEvent.from_dict(data)


class TestServing():
    def test_best_variant_tie(self):
        shard = ShardState.from_perms(0, [Permutation((0, 1, 2)), Permutation((1, 0, 2)), Permutation((2, 1, 0))])
        shard.deactivate(2)
        assert best_variant(shard).index == 0

    def test_all_dead(self):
        shard = ShardState.from_perms(0, [Permutation((0, 1))])
        shard.deactivate(0)
        assert best_variant(shard) is None

    def test_system_alive_sisa(self):
        state = initialize(2, 3, 1, mode='sisa')
        assert system_alive(state)
        state, _ = apply_deletion(state, (0, 0))
        assert system_alive(state)
        state, event = apply_deletion(state, (1, 0))
        assert not system_alive(state)
        assert not event.system_alive_after

    def test_any_shard_failure(self):
        state = initialize(2, 3, 1, mode='sisa', failure='any-shard')
        state, _ = apply_deletion(state, (0, 0))
        assert not system_alive(state)

    def test_cyclic_needs_every_slice(self):
        L = 3
        for order in ([0, 1, 2], [2, 0, 1], [1, 2, 0], [0, 2, 1]):
            state = initialize(1, L, 3)
            for number, slice_index in enumerate(order, 1):
                state, _ = apply_deletion(state, (0, slice_index))
                assert system_alive(state) == (number < L)

    def test_sisa_checkpoint_prefix(self):
        state = initialize(1, 5, 1, mode='sisa')
        assert sisa_checkpoint_prefix(state.shards[0]) == 5
        state, _ = apply_deletion(state, (0, 3))
        assert sisa_checkpoint_prefix(state.shards[0]) == 3
        state, _ = apply_deletion(state, (0, 0))
        assert sisa_checkpoint_prefix(state.shards[0]) == 0
        with pytest.raises(InvalidInputError):
            sisa_checkpoint_prefix(initialize(1, 5, 2).shards[0])

    def test_leak_detected(self):
        state = initialize(1, 3, 1)
        state.shards[0].deleted_slices.add(1)
        with pytest.raises(UnlearningError):
            check_exact_unlearning(state)
        with pytest.raises(UnlearningError):
            SystemState.from_dict(state.to_dict())


class TestTrajectories():
    def test_random_trajectories(self):
        rng = make_rng(2024)
        for trajectory in range(300):
            m, L = int(rng.integers(1, 9)), int(rng.integers(1, 17))
            B = int(rng.integers(1, L + 1))
            state = initialize(m, L, B, plan_source='random', seed=trajectory)
            sisa = initialize(m, L, 1, mode='sisa')
            identity = initialize(m, L, 1, plan_source='explicit', plans=SelectionPlan((Permutation.identity(L),), 'explicit'))
            alive, best = True, state.best_prefixes()
            for _ in range(int(rng.integers(1, 3 * m * L))):
                target = (int(rng.integers(0, m)), int(rng.integers(0, L)))
                event = state.apply(target)
                sisa.apply(target)
                identity.apply(target)
                check_exact_unlearning(state)
                assert alive or not event.system_alive_after
                alive = event.system_alive_after
                assert all(a <= b for a, b in zip(state.best_prefixes(), best))
                best = state.best_prefixes()
                assert identity.best_prefixes() == sisa.best_prefixes()
                assert [sisa_checkpoint_prefix(s) for s in sisa.shards] == sisa.best_prefixes()

    def test_replay_matches_direct(self, tmp_path):
        rng = make_rng(77)
        sources = ('cyclic', 'random', 'bms', 'conditional', 'sorted-cyclic')
        log = tmp_path / 'tail.s3t.jsonl'
        for trajectory in range(10000):
            source = sources[trajectory % len(sources)]
            m, L = int(rng.integers(1, 5)), int(rng.integers(1, 9))
            if source == 'bms':
                m, L = min(m, 3), min(L, 5)
            prior = None
            if source in ('bms', 'sorted-cyclic'):
                prior = dirichlet_prior(L, 1.0, trajectory)
            elif source == 'conditional':
                prior = DeletionPrior.uniform(L)
            ceiling = L if prior is not None else min(2 * L, math.factorial(L))
            B = int(rng.integers(1, ceiling + 1))
            manifest = partition(m * L + int(rng.integers(0, 2 * m * L)), m, L) if trajectory % 2 else None
            state = initialize(m, L, B, plan_source=source, prior=prior, manifest=manifest, seed=trajectory)
            requests = int(rng.integers(1, 2 * m * L + 1))
            j = int(rng.integers(0, requests + 1))
            snapshot, tail = state.copy(), []
            for step in range(requests):
                live = sorted(set(range(manifest.n_items)) - state.deleted_items) if manifest is not None else []
                if live and rng.random() < 0.7:
                    target = live[int(rng.integers(0, len(live)))]
                else:
                    target = (int(rng.integers(0, m)), int(rng.integers(0, L)))
                event = state.apply(target)
                if step == j - 1:
                    snapshot = state.copy()
                if step >= j:
                    tail.append(event)
            check_exact_unlearning(state)
            if trajectory % 100 == 0:
                path = tmp_path / 'prefix.s3t.json'
                save_snapshot(snapshot, path)
                log.write_text('')
                for event in tail:
                    append_event(log, event)
                replayed = replay(path, log)
            else:
                log.write_text(''.join(canonical_json(event.to_dict()) + '\n' for event in tail))
                replayed = replay(snapshot, log)
            assert replayed.request_count == requests
            assert state_bytes(replayed) == state_bytes(state)
