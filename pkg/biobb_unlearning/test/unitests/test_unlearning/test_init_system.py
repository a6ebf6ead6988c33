# type: ignore
import pytest
from biobb_common.tools import test_fixtures as fx
from biobb_unlearning.s3t.engine import initialize
from biobb_unlearning.s3t.registry import load_snapshot_record, state_bytes
from biobb_unlearning.s3t.selection import SelectionPlan
from biobb_unlearning.unlearning.init_system import init_system


class TestInitSystem():
    def setup_class(self):
        fx.test_setup(self, 'init_system')

    def teardown_class(self):
        fx.test_teardown(self)
        # pass

    def test_init_system(self):
        init_system(properties=self.properties, **self.paths)
        assert fx.not_empty(self.paths['output_snapshot_path'])
        snapshot = load_snapshot_record(self.paths['output_snapshot_path'])
        state = snapshot.state
        assert (state.mode, state.m, state.L, state.B, state.request_count) == ('s3t', 3, 4, 4, 0)
        assert snapshot.checksum.startswith('sha256:')
        for shard in state.shards:
            assert sorted(v.perm.order[0] for v in shard.variants) == [0, 1, 2, 3]
            assert all(v.active_prefix == 4 for v in shard.variants)
        assert state.best_prefixes() == [4, 4, 4]

    def test_metadata_reruns(self):
        with open(self.paths['output_snapshot_path']) as snapshot_file:
            assert snapshot_file.read().startswith('{"metadata":')
        snapshot = load_snapshot_record(self.paths['output_snapshot_path'])
        config = snapshot.metadata['config']
        assert snapshot.metadata['seed'] == 0
        assert config['prior'] == pytest.approx([0.5, 0.3, 0.15, 0.05])
        assert config['plans'] == [[v.perm.to_list() for v in shard.variants] for shard in snapshot.state.shards]
        plans = [SelectionPlan(tuple(tuple(s) for s in sequences), 'explicit') for sequences in config['plans']]
        rerun = initialize(config['m'], config['L'], config['B'], config['mode'], 'explicit', plans=plans,
                           t=config['t'], failure=config['failure'])
        assert state_bytes(rerun) == state_bytes(snapshot.state)


class TestInitSystemCyclic():
    def setup_class(self):
        fx.test_setup(self, 'init_system_cyclic')

    def teardown_class(self):
        fx.test_teardown(self)
        # pass

    def test_init_system_cyclic(self):
        init_system(properties=self.properties, **self.paths)
        assert fx.not_empty(self.paths['output_snapshot_path'])
        output = load_snapshot_record(self.paths['output_snapshot_path'])
        reference = load_snapshot_record(self.paths['ref_output_snapshot_path'])
        assert output.checksum == reference.checksum
        assert state_bytes(output.state) == state_bytes(reference.state)
        assert output.metadata['config']['prior'] is None
