# type: ignore
import json
import pytest
from biobb_unlearning.s3t.core import (DeletionPrior, InvalidInputError, PartitionManifest, Permutation, derive_seed,
                                       dirichlet_prior, make_rng, partition, shard_priors, uniform_prior)


class TestPermutation():
    def test_inverse(self):
        perm = Permutation((3, 1, 0, 2))
        assert perm.inverse == (2, 1, 3, 0)
        assert perm.position(0) == 2

    def test_identity(self):
        assert Permutation.identity(4).to_list() == [0, 1, 2, 3]

    @pytest.mark.parametrize('order', [(0, 0, 1), (1, 2, 3), ()])
    def test_invalid(self, order):
        with pytest.raises(InvalidInputError):
            Permutation(order)


class TestDeletionPrior():
    def test_uniform(self):
        assert uniform_prior(4).to_list() == [0.25] * 4

    def test_renormalized_within_tolerance(self):
        prior = DeletionPrior((0.5, 0.5 + 1e-10))
        assert sum(prior.probs) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize('probs', [(0.5, 0.6), (1.2, -0.2), (), (float('nan'), 1.0)])
    def test_invalid(self, probs):
        with pytest.raises(InvalidInputError):
            DeletionPrior(probs)

    def test_dirichlet_is_seeded(self):
        assert dirichlet_prior(6, 1.0, 11) == dirichlet_prior(6, 1.0, 11)
        assert dirichlet_prior(6, 1.0, 11) != dirichlet_prior(6, 1.0, 12)
        assert sum(dirichlet_prior(6, 0.5, 1).probs) == pytest.approx(1.0)

    def test_dirichlet_alpha(self):
        with pytest.raises(InvalidInputError):
            dirichlet_prior(4, 0.0)

    def test_shard_priors(self):
        prior = DeletionPrior((0.7, 0.3))
        assert shard_priors(prior, 3, 2) == [prior] * 3
        assert shard_priors(None, 2, 2) == [uniform_prior(2)] * 2
        assert len(shard_priors([[0.5, 0.5], [1.0, 0.0]], 2, 2)) == 2
        with pytest.raises(InvalidInputError):
            shard_priors([[0.5, 0.5]], 2, 2)
        with pytest.raises(InvalidInputError):
            shard_priors([0.5, 0.25, 0.25], 2, 2)


class TestSeeds():
    def test_streams_are_reproducible(self):
        assert make_rng(5, 1, 2).integers(0, 1000, 5).tolist() == make_rng(5, 1, 2).integers(0, 1000, 5).tolist()
        assert derive_seed(5, 1) == derive_seed(5, 1)
        assert derive_seed(5, 1) != derive_seed(5, 2)

    def test_negative_seed(self):
        with pytest.raises(InvalidInputError):
            make_rng(-1)


class TestPartition():
    def test_even_division(self):
        assert partition(6, 1, 3).slice_sizes == [[2, 2, 2]]

    def test_remainder_spread(self):
        assert sorted(partition(7, 1, 3).slice_sizes[0]) == [2, 2, 3]

    def test_seeded_uniform_is_deterministic(self):
        first = partition(100, 5, 4, 'seeded-uniform', 7)
        second = partition(100, 5, 4, 'seeded-uniform', 7)
        assert json.dumps(first.to_dict()) == json.dumps(second.to_dict())
        assert first != partition(100, 5, 4, 'seeded-uniform', 8)

    def test_sizes_near_equal(self):
        sizes = [s for row in partition(103, 5, 4, 'seeded-uniform', 1).slice_sizes for s in row]
        assert max(sizes) - min(sizes) <= 1
        assert sum(sizes) == 103

    def test_too_few_items(self):
        with pytest.raises(InvalidInputError, match='smaller than m\\*L'):
            partition(19, 5, 4)

    def test_unknown_policy(self):
        with pytest.raises(InvalidInputError):
            partition(20, 5, 4, 'blocks')

    def test_manifest_round_trip(self):
        manifest = partition(40, 2, 4, 'seeded-uniform', 3)
        assert PartitionManifest.from_dict(manifest.to_dict()) == manifest
        assert manifest.locate(0) == manifest.assignment[0]
        with pytest.raises(InvalidInputError):
            manifest.locate(40)
