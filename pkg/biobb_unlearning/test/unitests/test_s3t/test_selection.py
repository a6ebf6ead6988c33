# type: ignore
from itertools import combinations, permutations
import numpy as np
import pytest
from biobb_unlearning.s3t import selection
from biobb_unlearning.s3t.core import (DeletionPrior, InfeasibleMatchingError, InvalidInputError, Permutation,
                                       SamplingExhaustedError, dirichlet_prior, make_rng, uniform_prior)
from biobb_unlearning.s3t.selection import (SelectionPlan, avg_pairwise_diversity, bms_select, conditional_sample,
                                            conditional_weights, cyclic_permutations, is_position_diverse,
                                            iterative_cyclic_rotation, max_weight_perfect_matching, random_diverse_plan,
                                            random_plan, rotate_right, select_plan, sequence_score,
                                            sorted_cyclic_rotation, total_score)


def lists(plan):
    return [list(p) for p in plan]


def brute_force_matching(weights):
    n = len(weights)
    return max(sum(weights[i][p[i]] for i in range(n)) for p in permutations(range(n)))


class TestRotation():
    @pytest.mark.parametrize('order,expected', [([0, 1, 2], [2, 0, 1]), ([0], [0]), ([3, 1, 0, 2], [2, 3, 1, 0])])
    def test_rotate_right(self, order, expected):
        assert rotate_right(Permutation(tuple(order))).to_list() == expected

    def test_cyclic_permutations(self):
        assert lists(cyclic_permutations(Permutation((0, 1, 2)))) == [[0, 1, 2], [2, 0, 1], [1, 2, 0]]
        assert lists(cyclic_permutations(Permutation((0,)))) == [[0]]
        assert is_position_diverse(cyclic_permutations(Permutation.identity(6)))

    def test_iterative_cyclic_rotation(self):
        assert lists(iterative_cyclic_rotation(3, 3)) == [[0, 1, 2], [2, 0, 1], [1, 2, 0]]
        assert lists(iterative_cyclic_rotation(3, 4)) == [[0, 1, 2], [2, 0, 1], [1, 2, 0], [0, 2, 1]]

    def test_full_permutation_space(self):
        plan = iterative_cyclic_rotation(5, 120)
        assert len({p.order for p in plan}) == 120

    def test_budget_exceeds_space(self):
        with pytest.raises(InvalidInputError, match='budget exceeds permutation space'):
            iterative_cyclic_rotation(3, 7)

    def test_deterministic(self):
        assert iterative_cyclic_rotation(6, 40) == iterative_cyclic_rotation(6, 40)


class TestScore():
    def test_uniform_t1(self):
        assert sequence_score(Permutation((0, 1, 2, 3)), uniform_prior(4), 1) == pytest.approx(2.5)

    def test_t0(self):
        prior = dirichlet_prior(5, 1.0, 2)
        assert sequence_score(Permutation((4, 2, 0, 1, 3)), prior, 0) == pytest.approx(15.0)

    def test_expansion(self):
        p = [0.1, 0.2, 0.3, 0.4]
        t = 3
        expected = 4 * (1 - sum(p)) ** t + 3 * (1 - p[0] - p[1] - p[2]) ** t + 2 * (1 - p[0] - p[1]) ** t + (1 - p[0]) ** t
        assert sequence_score(Permutation((0, 1, 2, 3)), DeletionPrior(tuple(p)), t) == pytest.approx(expected)

    def test_decreasing_in_t(self):
        prior = dirichlet_prior(6, 1.0, 4)
        perm = Permutation((5, 3, 1, 0, 2, 4))
        scores = [sequence_score(perm, prior, t) for t in range(6)]
        assert all(a > b for a, b in zip(scores, scores[1:]))

    def test_negative_horizon(self):
        with pytest.raises(InvalidInputError):
            sequence_score(Permutation((0, 1)), uniform_prior(2), -1)


class TestMatching():
    def test_small(self):
        assert max_weight_perfect_matching([[1, 2], [2, 4]]) == (0, 1)

    def test_identity_mask(self):
        weights = np.arange(9, dtype=float).reshape(3, 3)
        assert max_weight_perfect_matching(weights, np.eye(3, dtype=bool)) == (0, 1, 2)

    def test_lexicographic_tie_break(self):
        assert max_weight_perfect_matching(np.ones((4, 4))) == (0, 1, 2, 3)

    def test_infeasible(self):
        mask = np.ones((3, 3), dtype=bool)
        mask[:, 0] = False
        with pytest.raises(InfeasibleMatchingError, match='infeasible matching'):
            max_weight_perfect_matching(np.ones((3, 3)), mask)

    @pytest.mark.parametrize('size', [2, 3, 4, 5, 6])
    def test_brute_force_oracle(self, size):
        rng = make_rng(size)
        for _ in range(100):
            weights = rng.random((size, size))
            assignment = max_weight_perfect_matching(weights)
            assert sorted(assignment) == list(range(size))
            value = sum(weights[i, c] for i, c in enumerate(assignment))
            assert value == pytest.approx(brute_force_matching(weights.tolist()), abs=1e-9)


class TestBMS():
    def test_two_slices(self):
        plan = bms_select(DeletionPrior((0.9, 0.1)), 1, 2)
        assert lists(plan) == [[1, 0], [0, 1]]
        assert selection.plan_scores(plan, DeletionPrior((0.9, 0.1)), 1) == pytest.approx([0.9, 0.1])

    def test_position_diverse_and_feasible(self):
        rng = make_rng(99)
        for trial in range(1000):
            L = int(rng.integers(2, 7))
            prior = dirichlet_prior(L, 1.0, 1000 + trial)
            plan = bms_select(prior, 10, int(rng.integers(1, L + 1)))
            assert is_position_diverse(plan)

    @pytest.mark.parametrize('L', [4, 6, 8])
    def test_dominates_random_and_sorted(self, L):
        bms, diverse, rotated = [], [], []
        for seed in range(10):
            prior = dirichlet_prior(L, 1.0, seed)
            bms.append(total_score(bms_select(prior, 10, L), prior, 10))
            rotated.append(total_score(sorted_cyclic_rotation(prior, L), prior, 10))
            samples = [total_score(random_diverse_plan(L, L, 100 * seed + i), prior, 10) for i in range(100)]
            diverse.append(np.mean(samples))
        assert np.mean(bms) >= np.mean(diverse)
        assert np.mean(bms) >= np.mean(rotated)

    def test_budget_above_L(self):
        plan = bms_select(dirichlet_prior(4, 1.0, 0), 10, 7, seed=3)
        assert plan.B == 7
        assert len({p.order for p in plan}) == 7
        assert is_position_diverse(plan.sequences[:4])


class TestConditional():
    def test_zero_weight_slice_last(self):
        plan = conditional_sample(DeletionPrior((1.0, 0.0, 0.0)), 2, seed=5)
        assert all(p[-1] == 0 for p in plan)

    def test_exhausted(self):
        with pytest.raises(SamplingExhaustedError, match='sampling exhausted'):
            conditional_sample(DeletionPrior((1.0, 0.0, 0.0)), 3, seed=5)

    def test_full_space(self):
        plan = conditional_sample(uniform_prior(3), 6, seed=1)
        assert {p.order for p in plan} == set(permutations(range(3)))

    def test_first_position_frequency(self):
        weights = conditional_weights(np.array([0.5, 0.4, 0.1]))
        rng = make_rng(17)
        firsts = [selection._sample_sequence(weights, rng)[0] for _ in range(10000)]
        assert firsts.count(2) / 10000 == pytest.approx(0.45, abs=0.02)

    def test_seeded(self):
        prior = dirichlet_prior(5, 1.0, 8)
        assert conditional_sample(prior, 10, seed=4) == conditional_sample(prior, 10, seed=4)


class TestSortedCyclic():
    def test_example(self):
        assert lists(sorted_cyclic_rotation(DeletionPrior((0.5, 0.4, 0.1)), 3)) == [[2, 1, 0], [0, 2, 1], [1, 0, 2]]

    def test_uniform_matches_cyclic(self):
        assert lists(sorted_cyclic_rotation(uniform_prior(5), 5)) == lists(iterative_cyclic_rotation(5, 5))

    def test_budget_above_L(self):
        with pytest.raises(InvalidInputError):
            sorted_cyclic_rotation(uniform_prior(3), 4)


class TestDiversity():
    def test_examples(self):
        assert avg_pairwise_diversity(iterative_cyclic_rotation(5, 5)) == 5.0
        same = Permutation((0, 1, 2))
        assert avg_pairwise_diversity([same, same]) == 0
        assert avg_pairwise_diversity([Permutation((0, 1, 2)), Permutation((0, 2, 1))]) == 2

    def test_undefined(self):
        with pytest.raises(InvalidInputError, match='diversity undefined'):
            avg_pairwise_diversity(iterative_cyclic_rotation(4, 1))

    def test_matches_pairwise_definition(self):
        plan = random_plan(5, 9, seed=2)
        pairs = list(combinations(plan, 2))
        expected = sum(selection.positional_distance(a, b) for a, b in pairs) / len(pairs)
        assert avg_pairwise_diversity(plan) == pytest.approx(expected)

    @pytest.mark.parametrize('L', range(2, 17))
    def test_optimal_for_small_budgets(self, L):
        prior = dirichlet_prior(L, 1.0, L)
        for plan in (iterative_cyclic_rotation(L, L), sorted_cyclic_rotation(prior, L), bms_select(prior, 10, L)):
            assert avg_pairwise_diversity(plan) == L

    def test_cyclic_against_random(self):
        L = 5
        # Mean positional distance of two distinct uniformly random permutations.
        random_mean = L - (120 - L) / 119
        for B in range(2, 121):
            value = avg_pairwise_diversity(iterative_cyclic_rotation(L, B))
            if B <= L:
                assert value == L
            assert value >= random_mean - 0.005
        sampled = np.mean([avg_pairwise_diversity(random_plan(L, 10, seed)) for seed in range(1000)])
        assert avg_pairwise_diversity(iterative_cyclic_rotation(L, 10)) > sampled


class TestPlans():
    def test_random_plan_distinct(self):
        plan = random_plan(4, 24, seed=0)
        assert len({p.order for p in plan}) == 24

    def test_random_diverse(self):
        assert is_position_diverse(random_diverse_plan(7, 5, seed=1))

    def test_plan_validation(self):
        with pytest.raises(InvalidInputError):
            SelectionPlan(((0, 1, 2), (0, 1, 2)), 'explicit')
        with pytest.raises(InvalidInputError):
            SelectionPlan(((0, 1, 2), (0, 2, 1)), 'cyclic')

    def test_plan_dict(self):
        plan = iterative_cyclic_rotation(4, 4)
        data = plan.to_dict(uniform_prior(4), 1)
        assert data['method'] == 'cyclic' and data['t'] == 1
        assert data['scores'] == pytest.approx([2.5] * 4)
        assert SelectionPlan.from_dict(data) == plan

    def test_select_plan(self):
        with pytest.raises(InvalidInputError, match='requires a deletion prior'):
            select_plan('bms', 4, 2)
        with pytest.raises(InvalidInputError):
            select_plan('greedy', 4, 2)
        prior = dirichlet_prior(4, 1.0, 0)
        assert select_plan('bms', 4, 4, prior, 10, 0) == select_plan('bms', 4, 4, prior, 10, 0)
        assert select_plan('cyclic', 5, 1).sequences == (Permutation.identity(5),)
