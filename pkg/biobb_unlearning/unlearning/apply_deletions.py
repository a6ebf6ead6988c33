#!/usr/bin/env python3

"""Module containing the ApplyDeletions class and the command line interface."""
from pathlib import Path
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.core import InvalidInputError
from biobb_unlearning.s3t.engine import best_variant, system_alive
from biobb_unlearning.s3t.registry import append_event, load_snapshot_record, save_snapshot
from biobb_unlearning.unlearning.common import metadata, read_json


def read_targets(path: str) -> list:
    """Deletion targets: item ids, ``[shard, slice]`` pairs or their object forms."""
    data = read_json(path, 'targets file')
    if isinstance(data, dict):
        data = data.get('targets')
    if not isinstance(data, list):
        raise InvalidInputError(f"invalid targets file {path}: expected a list of targets")
    return data


class ApplyDeletions(BiobbObject):
    """
    | biobb_unlearning ApplyDeletions
    | Execute deletion requests on a sharded unlearning ensemble.
    | Every request switches off, in each variant of the affected shard, the layer groups trained on the deleted slice and after it. Each executed request is appended to an event log and the final state is written as a new snapshot.

    Args:
        input_snapshot_path (str): Snapshot of the state the requests are applied to. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/init.s3t.json>`_. Accepted formats: json (edam:format_3464).
        input_targets_path (str): JSON list of deletion targets, item ids or [shard, slice] pairs. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/targets.json>`_. Accepted formats: json (edam:format_3464).
        output_snapshot_path (str): Snapshot after the last request. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/final.s3t.json>`_. Accepted formats: json (edam:format_3464).
        output_log_path (str): Event log, one JSON line per executed request. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/events.s3t.jsonl>`_. Accepted formats: jsonl (edam:format_3464).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **stop_on_failure** (*bool*) - (False) Stop at the first request after which the system must be retrained.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.apply_deletions import apply_deletions
            apply_deletions(input_snapshot_path='/path/to/init.s3t.json',
                            input_targets_path='/path/to/targets.json',
                            output_snapshot_path='/path/to/final.s3t.json',
                            output_log_path='/path/to/events.s3t.jsonl')

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, input_snapshot_path: str, input_targets_path: str,
                 output_snapshot_path: str, output_log_path: str,
                 properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {'input_snapshot_path': input_snapshot_path,
                   'input_targets_path': input_targets_path},
            'out': {'output_snapshot_path': output_snapshot_path,
                    'output_log_path': output_log_path}
        }

        # Properties specific for BB
        self.properties = properties
        self.stop_on_failure = properties.get('stop_on_failure', False)

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`ApplyDeletions <unlearning.apply_deletions.ApplyDeletions>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        snapshot = load_snapshot_record(self.stage_io_dict['in']['input_snapshot_path'])
        state = snapshot.state
        targets = read_targets(self.stage_io_dict['in']['input_targets_path'])
        log_path = self.stage_io_dict['out']['output_log_path']
        Path(log_path).write_text('')
        fu.log('Applying %d deletion request(s) from request %d' % (len(targets), state.request_count + 1), self.out_log)

        for target in targets:
            event = state.apply(target)
            append_event(log_path, event, self.out_log)
            shard = state.shards[event.shard]
            best = best_variant(shard)
            fu.log('Request %d: shard %d slice %d, %d variant(s) lost, best prefix %s' %
                   (event.request_id, event.shard, event.slice, event.newly_dead_variants,
                    None if best is None else list(best.prefix)), self.out_log)
            if not system_alive(state):
                fu.log('System must be retrained after request %d' % event.request_id, self.out_log)
                if self.stop_on_failure:
                    break

        config = {'base_checksum': snapshot.checksum, 'requests': state.request_count}
        save_snapshot(state, self.stage_io_dict['out']['output_snapshot_path'],
                      metadata=metadata('delete', config), out_log=self.out_log)

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def apply_deletions(input_snapshot_path: str, input_targets_path: str,
                    output_snapshot_path: str, output_log_path: str,
                    properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`ApplyDeletions <unlearning.apply_deletions.ApplyDeletions>` class and
    execute :meth:`launch() <unlearning.apply_deletions.ApplyDeletions.launch>` method"""
    return ApplyDeletions(**dict(locals())).launch()


apply_deletions.__doc__ = ApplyDeletions.__doc__
main = ApplyDeletions.get_main(apply_deletions, "Execute deletion requests on a sharded unlearning ensemble.")

if __name__ == '__main__':
    main()
