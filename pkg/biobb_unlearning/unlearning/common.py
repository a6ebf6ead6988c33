""" Common functions for package biobb_unlearning.unlearning """
from pathlib import Path
from typing import Optional, Sequence
import csv
import json
from biobb_unlearning.s3t.core import DeletionPrior, InvalidInputError, as_prior
from biobb_unlearning.s3t.montecarlo import TrialConfig

TOOL_NAME = 'biobb_unlearning'
OUTPUT_FORMATS = ('csv', 'json')


def tool_version() -> str:
    import biobb_unlearning
    return biobb_unlearning.__version__


def metadata(command: str, config: dict, seed=None) -> dict:
    """Header written at the top of every output file."""
    return {'tool': TOOL_NAME, 'version': tool_version(), 'command': command,
            'seed': seed, 'config': config}


def output_format(path: str, requested: Optional[str] = None) -> str:
    if requested:
        if requested not in OUTPUT_FORMATS:
            raise InvalidInputError(f"unknown output format {requested!r}, expected one of {OUTPUT_FORMATS}")
        return requested
    return 'csv' if Path(path).suffix.lower() == '.csv' else 'json'


def _csv_value(value):
    if value is None:
        return 'null'
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, sort_keys=True, separators=(',', ':'))
    return value


def write_csv(path: str, header: dict, columns: Sequence[str], rows: Sequence[dict]) -> None:
    """CSV preceded by ``# key: value`` metadata lines; column order is ``columns``."""
    with open(path, 'w', newline='') as out_file:
        for key, value in header.items():
            out_file.write('# %s: %s\n' % (key, _csv_value(value)))
        writer = csv.DictWriter(out_file, fieldnames=list(columns), extrasaction='ignore')
        writer.writeheader()
        for row in rows:
            writer.writerow({c: _csv_value(row.get(c)) for c in columns})


def write_json(path: str, header: dict, payload: dict) -> None:
    """JSON object whose first key is the ``metadata`` header; the payload keys follow sorted."""
    body = json.loads(json.dumps(payload, sort_keys=True))
    with open(path, 'w') as out_file:
        out_file.write(json.dumps({'metadata': header, **body}, indent=4))
        out_file.write('\n')


def write_table(path: str, header: dict, columns: Sequence[str], rows: Sequence[dict],
                requested_format: Optional[str] = None, payload: Optional[dict] = None) -> str:
    """Writes ``rows`` as CSV or JSON depending on ``requested_format`` or the file extension."""
    fmt = output_format(path, requested_format)
    if fmt == 'csv':
        write_csv(path, header, columns, rows)
    else:
        write_json(path, header, payload if payload is not None else {'columns': list(columns), 'rows': list(rows)})
    return fmt


def read_json(path: str, what: str = 'file'):
    try:
        with open(path, 'r') as in_file:
            return json.load(in_file)
    except json.JSONDecodeError as err:
        raise InvalidInputError(f"invalid {what} {path}: {err}") from err


def _parse_cell(value: str):
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def read_table(path: str) -> tuple:
    """Reads a table written by :func:`write_table`.

    Returns:
        tuple: (metadata header, list of row dicts). CSV cells are decoded as JSON where possible.
    """
    if output_format(path) == 'json':
        data = read_json(path, 'table')
        return data.get('metadata', {}), data.get('rows', [])
    header, lines = {}, []
    with open(path, newline='') as in_file:
        for line in in_file:
            if line.startswith('# '):
                key, _, value = line[2:].rstrip('\r\n').partition(': ')
                header[key] = _parse_cell(value)
            else:
                lines.append(line)
    return header, [{key: _parse_cell(value) for key, value in row.items()} for row in csv.DictReader(lines)]


def read_prior(path: Optional[str], L: Optional[int] = None):
    """Reads a prior file: one vector for every shard or a list of per-shard vectors.

    The values may also be wrapped in an object under the ``prior`` key.
    """
    if not path:
        return None
    data = read_json(path, 'prior file')
    if isinstance(data, dict):
        data = data.get('prior')
    if not isinstance(data, list) or not data:
        raise InvalidInputError(f"invalid prior file {path}: expected a vector or a list of vectors")
    if isinstance(data[0], list):
        return [as_prior(v, L) for v in data]
    return as_prior(data, L)


def first_prior(prior) -> Optional[DeletionPrior]:
    if prior is None or isinstance(prior, DeletionPrior):
        return prior
    return prior[0]


def int_list(value, name: str) -> list:
    """Accepts an integer, a list of integers or a comma separated string."""
    if value is None:
        return []
    if isinstance(value, str):
        value = [v for v in value.replace(' ', '').split(',') if v]
    if not isinstance(value, (list, tuple)):
        value = [value]
    try:
        return [int(v) for v in value]
    except (TypeError, ValueError) as err:
        raise InvalidInputError(f"{name} must be a list of integers, got {value!r}") from err


TRIAL_FIELDS = ('m', 'L', 'B', 'mode', 'plan_source', 'prior_spec', 'alpha', 'priors', 'granularity', 'n_items',
                'failure', 'trials', 'seed', 't', 'max_requests', 'fast_path', 'label')


def trial_overrides(properties: dict) -> dict:
    """TrialConfig fields explicitly set in the block properties."""
    return {key: properties[key] for key in TRIAL_FIELDS if properties.get(key) is not None}


def trial_configs(data, overrides: Optional[dict] = None, prior=None) -> list:
    """Expands a configuration object, or a list of them, into TrialConfig objects.

    A list-valued ``B`` produces one configuration per budget; sisa runs always use B=1.
    An explicit ``prior`` switches ``prior_spec`` to explicit.
    """
    items = data if isinstance(data, list) else [data or {}]
    configs = []
    for item in items:
        if not isinstance(item, dict):
            raise InvalidInputError(f"invalid trial configuration {item!r}")
        fields = {**item, **(overrides or {})}
        if prior is not None:
            vectors = [prior] if isinstance(prior, DeletionPrior) else list(prior)
            fields.update({'prior_spec': 'explicit', 'priors': [p.to_list() for p in vectors]})
        budgets = [1] if fields.get('mode') == 'sisa' else int_list(fields.get('B', 1), 'B')
        for budget in budgets:
            configs.append(TrialConfig.from_dict({**fields, 'B': budget}))
    return configs
