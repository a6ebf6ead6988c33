# type: ignore
import csv
import json
import pytest
from biobb_unlearning.s3t.core import make_rng
from biobb_unlearning.s3t.engine import initialize
from biobb_unlearning.s3t.registry import append_event, save_snapshot
from biobb_unlearning.unlearning.s3t_cli import main


def csv_rows(text):
    lines = [line for line in text.splitlines() if not line.startswith('#')]
    return list(csv.DictReader(lines))


def header(text):
    return dict(line[2:].split(': ', 1) for line in text.splitlines() if line.startswith('# '))


class TestS3tCli():
    def test_select_cyclic(self, capsys):
        assert main(['select', '--L', '3', '--B', '3', '--method', 'cyclic']) == 0
        plan = json.loads(capsys.readouterr().out)['plan']
        assert plan['sequences'] == [[0, 1, 2], [2, 0, 1], [1, 2, 0]]
        assert plan['avg_pairwise_diversity'] == 3.0

    def test_select_identity(self, capsys):
        assert main(['select', '--L', '5', '--B', '1']) == 0
        output = json.loads(capsys.readouterr().out)
        assert output['plan']['sequences'] == [[0, 1, 2, 3, 4]]
        assert output['metadata']['seed'] == 0

    def test_select_bms_is_deterministic(self, tmp_path):
        prior = tmp_path / 'p.json'
        prior.write_text('[0.4, 0.3, 0.2, 0.1]')
        outputs = []
        for name in ('a.json', 'b.json'):
            out = tmp_path / name
            assert main(['select', '--L', '4', '--B', '4', '--method', 'bms', '--prior', str(prior), '--t', '10',
                         '--out', str(out)]) == 0
            outputs.append(json.loads(out.read_text())['plan'])
        assert outputs[0] == outputs[1]

    def test_select_errors(self, tmp_path, capsys):
        assert main(['select', '--L', '3', '--B', '7']) == 2
        assert 'budget exceeds permutation space' in capsys.readouterr().err
        prior = tmp_path / 'bad.json'
        prior.write_text('[0.9, 0.9, 0.1]')
        assert main(['select', '--L', '3', '--B', '2', '--method', 'bms', '--prior', str(prior)]) == 2

    def test_usage_errors(self):
        with pytest.raises(SystemExit) as error:
            main(['bounds', '--m', '5'])
        assert error.value.code == 1
        with pytest.raises(SystemExit) as error:
            main(['select', '--L', '3', '--B', '2', '--method', 'greedy'])
        assert error.value.code == 1

    def test_bounds(self, capsys):
        assert main(['bounds', '--m', '5', '--L', '4', '--B', '1']) == 0
        text = capsys.readouterr().out
        row = csv_rows(text)[0]
        assert float(row['sisa_bound']) == pytest.approx(45.667, abs=1e-3)
        assert header(text)['tool'] == 'biobb_unlearning'

    def test_bounds_trivial(self, capsys):
        assert main(['bounds', '--m', '1', '--L', '1', '--B', '1']) == 0
        assert float(csv_rows(capsys.readouterr().out)[0]['s3t_bound']) == 1.0

    def test_retention(self, capsys):
        assert main(['retention', '--L', '4', '--B', '1', '--k', '2', '--r', '3']) == 0
        row = csv_rows(capsys.readouterr().out)[0]
        assert float(row['p_sisa']) == pytest.approx(0.125)
        assert float(row['p_s3t']) == pytest.approx(0.125)
        assert float(row['gap']) == 0.0

    def test_simulate(self, tmp_path):
        out = tmp_path / 'sweep.csv'
        assert main(['simulate', '--m', '5', '--L', '8', '--B', '1', '2', '4', '8', '--trials', '2000',
                     '--seed', '3', '--out', str(out)]) == 0
        text = out.read_text()
        rows = csv_rows(text)
        means = [float(r['mean']) for r in rows]
        assert [int(r['B']) for r in rows] == [1, 2, 4, 8]
        assert all(a < b for a, b in zip(means, means[1:]))
        assert header(text)['seed'] == '3'

    def test_simulate_single_trial(self, tmp_path):
        out = tmp_path / 'one.csv'
        assert main(['simulate', '--m', '2', '--L', '3', '--B', '2', '--trials', '1', '--out', str(out)]) == 0
        rows = csv_rows(out.read_text())
        assert len(rows) == 1 and rows[0]['ci95'] == 'null'

    def test_simulate_bad_config(self, tmp_path):
        config = tmp_path / 'bad.json'
        config.write_text('{"m": 5, "L": 4, "B": 2, "shards": 3}')
        assert main(['simulate', '--config', str(config), '--out', str(tmp_path / 'x.csv')]) == 2

    def test_compare(self, tmp_path):
        config = tmp_path / 'compare.json'
        config.write_text(json.dumps([{'m': 5, 'L': 32, 'B': 1, 'mode': 'sisa'}, {'m': 5, 'L': 32, 'B': 8}]))
        out = tmp_path / 'compare.json.out'
        assert main(['compare', '--config', str(config), '--trials', '5000', '--format', 'json', '--out', str(out)]) == 0
        rows = json.loads(out.read_text())['comparison']
        assert rows[1]['ratio'] >= 1.5

    def test_replay(self, tmp_path, capsys):
        state = initialize(3, 6, 4, plan_source='random', seed=2)
        rng = make_rng(1)
        for _ in range(10):
            state.apply((int(rng.integers(0, 3)), int(rng.integers(0, 6))))
        save_snapshot(state, tmp_path / 'r10.s3t.json')
        log = tmp_path / 'events.s3t.jsonl'
        log.write_text('')
        for _ in range(40):
            append_event(log, state.apply((int(rng.integers(0, 3)), int(rng.integers(0, 6)))))
        save_snapshot(state, tmp_path / 'r50.s3t.json')

        assert main(['replay', '--snapshot', str(tmp_path / 'r10.s3t.json'), '--log', str(log),
                     '--reference', str(tmp_path / 'r50.s3t.json')]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report['verdict'] == 'PASS' and report['events'] == 40

        empty = tmp_path / 'empty.s3t.jsonl'
        empty.write_text('')
        assert main(['replay', '--snapshot', str(tmp_path / 'r10.s3t.json'), '--log', str(empty),
                     '--reference', str(tmp_path / 'r10.s3t.json')]) == 0
        capsys.readouterr()

        corrupted = tmp_path / 'corrupted.s3t.json'
        corrupted.write_text((tmp_path / 'r10.s3t.json').read_text().replace('"request_count":10', '"request_count":11'))
        assert main(['replay', '--snapshot', str(corrupted), '--log', str(log)]) == 2
        assert json.loads(capsys.readouterr().out)['verdict'] == 'FAIL'

    def test_partition_init_delete(self, tmp_path):
        manifest = tmp_path / 'manifest.json'
        assert main(['partition', '--n-items', '40', '--m', '2', '--L', '4', '--out', str(manifest)]) == 0
        snapshot = tmp_path / 'init.s3t.json'
        assert main(['init', '--m', '2', '--L', '4', '--B', '3', '--manifest', str(manifest), '--out', str(snapshot)]) == 0
        targets = tmp_path / 'targets.json'
        targets.write_text('[3, [1, 2], {"item": 17}]')
        final = tmp_path / 'final.s3t.json'
        log = tmp_path / 'events.s3t.jsonl'
        assert main(['delete', '--snapshot', str(snapshot), '--targets', str(targets), '--log', str(log),
                     '--out', str(final)]) == 0
        assert len(log.read_text().splitlines()) == 3
        assert main(['replay', '--snapshot', str(snapshot), '--log', str(log), '--reference', str(final),
                     '--out', str(tmp_path / 'report.json')]) == 0
