# type: ignore
from biobb_common.tools import test_fixtures as fx
from biobb_unlearning.s3t.registry import load_snapshot_record, read_events
from biobb_unlearning.unlearning.apply_deletions import apply_deletions


class TestApplyDeletions():
    def setup_class(self):
        fx.test_setup(self, 'apply_deletions')

    def teardown_class(self):
        fx.test_teardown(self)
        # pass

    def test_apply_deletions(self):
        apply_deletions(properties=self.properties, **self.paths)
        assert fx.not_empty(self.paths['output_snapshot_path'])
        assert fx.not_empty(self.paths['output_log_path'])
        assert read_events(self.paths['output_log_path']) == read_events(self.paths['ref_output_log_path'])
        output = load_snapshot_record(self.paths['output_snapshot_path'])
        reference = load_snapshot_record(self.paths['ref_output_snapshot_path'])
        assert output.checksum == reference.checksum
        assert output.state.best_prefixes() == [1, 2]
