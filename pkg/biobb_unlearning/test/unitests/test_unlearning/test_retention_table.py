# type: ignore
import json
import pytest
from biobb_common.tools import test_fixtures as fx
from biobb_unlearning.unlearning.common import read_table
from biobb_unlearning.unlearning.retention_table import retention_table


class TestRetentionTable():
    def setup_class(self):
        fx.test_setup(self, 'retention_table')

    def teardown_class(self):
        fx.test_teardown(self)
        # pass

    def test_retention_table(self):
        retention_table(properties=self.properties, **self.paths)
        assert fx.not_empty(self.paths['output_retention_path'])
        with open(self.paths['output_retention_path']) as retention_file:
            rows = json.load(retention_file)['rows']
        assert [(row['k'], row['r']) for row in rows] == [(1, 0), (1, 1), (1, 3), (2, 0), (2, 1), (2, 3)]
        for row in rows:
            assert row['gap'] == pytest.approx(row['p_s3t'] - row['p_sisa'], abs=1e-12)
            assert row['p_s3t'] >= row['p_sisa']
            if row['r'] == 0:
                assert row['p_s3t'] == row['p_sisa'] == 1.0
        _, reference = read_table(self.paths['ref_output_retention_path'])
        assert len(rows) == len(reference)
        for row, expected in zip(rows, reference):
            assert {key: row[key] for key in expected} == pytest.approx(expected, rel=1e-9)
