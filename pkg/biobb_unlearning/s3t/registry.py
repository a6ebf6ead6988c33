#!/usr/bin/env python3

"""Module containing snapshot, event-log and manifest persistence for the unlearning controller."""
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union
import hashlib
import json
import logging
import math
import os
from biobb_common.tools import file_utils as fu
from biobb_unlearning.s3t.core import (InvalidInputError, LogDiscontinuityError, PartitionManifest, SnapshotError,
                                       UnlearningError)
from biobb_unlearning.s3t.engine import DeletionEvent, SystemState

SNAPSHOT_VERSION = 1
MANIFEST_VERSION = 1
SNAPSHOT_SUFFIX = '.s3t.json'
LOG_SUFFIX = '.s3t.jsonl'

PathLike = Union[str, Path]


def _encode(value) -> str:
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidInputError(f"non-finite float {value!r} cannot be serialized")
        text = format(value, '.17g')
        return text if any(c in text for c in '.en') else text + '.0'
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        items = sorted((str(k), v) for k, v in value.items())
        return '{' + ','.join(json.dumps(k, ensure_ascii=False) + ':' + _encode(v) for k, v in items) + '}'
    if isinstance(value, (list, tuple)):
        return '[' + ','.join(_encode(v) for v in value) + ']'
    raise InvalidInputError(f"cannot serialize {type(value).__name__} value {value!r}")


def canonical_json(data) -> str:
    """Compact JSON with sorted keys and floats written with 17 significant digits."""
    return _encode(data)


def checksum(data) -> str:
    return 'sha256:' + hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def state_bytes(state: SystemState) -> bytes:
    return canonical_json(state.to_dict()).encode('utf-8')


@dataclass(frozen=True)
class Snapshot:
    version: int
    state: SystemState
    created_at: str
    checksum: str
    metadata: Optional[dict] = None


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + '.tmp')
    with open(tmp, 'w', encoding='utf-8') as handle:
        handle.write(text)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)


def _record_text(record: dict, metadata: Optional[dict]) -> str:
    # The metadata object is written first; the rest keeps canonical key order.
    body = canonical_json(record)
    if metadata is None:
        return body + '\n'
    return '{"metadata":' + canonical_json(metadata) + ',' + body[1:] + '\n'


def save_snapshot(state: SystemState, path: PathLike, created_at: Optional[str] = None,
                  metadata: Optional[dict] = None, out_log: Optional[logging.Logger] = None) -> str:
    """Writes ``state`` atomically and returns the checksum of its canonical serialization.

    ``metadata`` opens the record and is not covered by the checksum.
    """
    data = state.to_dict()
    digest = checksum(data)
    record = {'version': SNAPSHOT_VERSION, 'checksum': digest,
              'created_at': created_at or datetime.now(timezone.utc).isoformat(timespec='seconds'),
              'state': data}
    _atomic_write(Path(path), _record_text(record, metadata))
    fu.log('Snapshot at request %d written to %s (%s)' % (state.request_count, path, digest), out_log)
    return digest


def load_snapshot_record(path: PathLike) -> Snapshot:
    try:
        record = json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as err:
        raise SnapshotError(f"cannot read snapshot {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise SnapshotError(f"malformed snapshot {path}: {err}") from err
    if not isinstance(record, dict) or 'state' not in record:
        raise SnapshotError(f"malformed snapshot {path}: missing state")
    if record.get('version') != SNAPSHOT_VERSION:
        raise SnapshotError(f"unknown snapshot version {record.get('version')!r} in {path}")
    digest = checksum(record['state'])
    if digest != record.get('checksum'):
        raise SnapshotError(f"checksum mismatch in {path}: stored {record.get('checksum')!r}, computed {digest!r}")
    try:
        state = SystemState.from_dict(record['state'])
    except UnlearningError as err:
        raise SnapshotError(f"invalid snapshot state in {path}: {err}") from err
    return Snapshot(SNAPSHOT_VERSION, state, str(record.get('created_at', '')), digest, record.get('metadata'))


def load_snapshot(path: PathLike) -> SystemState:
    return load_snapshot_record(path).state


def _drop_torn_tail(log_path: PathLike, out_log: Optional[logging.Logger] = None) -> None:
    path = Path(log_path)
    if not path.exists() or path.stat().st_size == 0:
        return
    data = path.read_bytes()
    if data.endswith(b'\n'):
        return
    keep = data.rfind(b'\n') + 1
    with open(path, 'r+b') as handle:
        handle.truncate(keep)
        handle.flush()
        os.fsync(handle.fileno())
    fu.log('WARNING: torn final line in %s truncated (%d bytes) before appending' % (log_path, len(data) - keep), out_log)


def append_event(log_path: PathLike, event: DeletionEvent, out_log: Optional[logging.Logger] = None) -> None:
    """Appends one complete JSON line and fsyncs it before returning.

    A torn final line left by an interrupted writer is cut back to the last newline first.
    """
    _drop_torn_tail(log_path, out_log)
    with open(log_path, 'a', encoding='utf-8') as handle:
        handle.write(canonical_json(event.to_dict()) + '\n')
        handle.flush()
        os.fsync(handle.fileno())


def read_events(log_path: PathLike, out_log: Optional[logging.Logger] = None) -> list:
    """Reads a deletion log. A torn final line is reported and skipped; any other bad line is an error."""
    try:
        text = Path(log_path).read_text(encoding='utf-8')
    except OSError as err:
        raise SnapshotError(f"cannot read event log {log_path}: {err}") from err
    lines = text.split('\n')
    complete, tail = lines[:-1], lines[-1]
    events = []
    for number, line in enumerate(complete, 1):
        if not line.strip():
            continue
        try:
            events.append(DeletionEvent.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
            raise SnapshotError(f"corrupt event on line {number} of {log_path}: {err}") from err
    if tail.strip():
        fu.log('WARNING: torn final line in %s ignored (%d bytes)' % (log_path, len(tail)), out_log)
    return events


def replay(snapshot: Union[SystemState, PathLike], log_path: PathLike,
           out_log: Optional[logging.Logger] = None) -> SystemState:
    """Re-applies the logged deletions to a snapshot through the engine.

    Request ids must continue the snapshot's request count without gaps, and every
    re-executed deletion must reproduce the logged event.
    """
    state = snapshot.copy() if isinstance(snapshot, SystemState) else load_snapshot(snapshot)
    events = read_events(log_path, out_log)
    for logged in events:
        expected = state.request_count + 1
        if logged.request_id != expected:
            raise LogDiscontinuityError(f"log discontinuity: expected request_id {expected}, found {logged.request_id}")
        event = state.apply(logged.target)
        if event != logged:
            raise SnapshotError(f"replayed request {logged.request_id} does not match the logged event")
    fu.log('Replayed %d event(s) from %s, now at request %d' % (len(events), log_path, state.request_count), out_log)
    return state


def same_state(a: SystemState, b: SystemState) -> bool:
    return state_bytes(a) == state_bytes(b)


def save_manifest(manifest: PartitionManifest, path: PathLike, metadata: Optional[dict] = None) -> str:
    data = manifest.to_dict()
    digest = checksum(data)
    record = {'version': MANIFEST_VERSION, 'checksum': digest, 'manifest': data}
    _atomic_write(Path(path), _record_text(record, metadata))
    return digest


def load_manifest(path: PathLike) -> PartitionManifest:
    try:
        record = json.loads(Path(path).read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as err:
        raise SnapshotError(f"cannot read manifest {path}: {err}") from err
    if not isinstance(record, dict) or record.get('version') != MANIFEST_VERSION or 'manifest' not in record:
        raise SnapshotError(f"unknown or malformed manifest file {path}")
    if checksum(record['manifest']) != record.get('checksum'):
        raise SnapshotError(f"checksum mismatch in {path}")
    return PartitionManifest.from_dict(record['manifest'])
