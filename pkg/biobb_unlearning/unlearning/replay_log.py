#!/usr/bin/env python3

"""Module containing the ReplayLog class and the command line interface."""
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.core import UnlearningError
from biobb_unlearning.s3t.engine import system_alive
from biobb_unlearning.s3t.registry import checksum, load_snapshot, replay, save_snapshot, same_state
from biobb_unlearning.unlearning.common import metadata, write_json

VERIFICATION_FAILED = 2


class ReplayLog(BiobbObject):
    """
    | biobb_unlearning ReplayLog
    | Rebuild a state from a snapshot and its deletion log.
    | Re-executes the logged deletion requests on the snapshot through the unlearning engine, checking that request ids continue the snapshot without gaps and that every replayed request reproduces its logged event. When a reference snapshot is given the replayed state must match it byte for byte. The verdict (PASS or FAIL) is written to a JSON report; a FAIL sets the return code to 2.

    Args:
        input_snapshot_path (str): Snapshot the log starts from. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/init.s3t.json>`_. Accepted formats: json (edam:format_3464).
        input_log_path (str): Event log, one JSON line per request. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/events.s3t.jsonl>`_. Accepted formats: jsonl (edam:format_3464).
        input_reference_path (str) (Optional): Snapshot of the directly computed state to compare against. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/final.s3t.json>`_. Accepted formats: json (edam:format_3464).
        output_report_path (str): Verification report. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/replay_report.json>`_. Accepted formats: json (edam:format_3464).
        output_snapshot_path (str) (Optional): Snapshot of the replayed state. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/final.s3t.json>`_. Accepted formats: json (edam:format_3464).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.replay_log import replay_log
            replay_log(input_snapshot_path='/path/to/init.s3t.json',
                       input_log_path='/path/to/events.s3t.jsonl',
                       input_reference_path='/path/to/final.s3t.json',
                       output_report_path='/path/to/replay_report.json')

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, input_snapshot_path: str, input_log_path: str, output_report_path: str,
                 input_reference_path: Optional[str] = None, output_snapshot_path: Optional[str] = None,
                 properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {'input_snapshot_path': input_snapshot_path,
                   'input_log_path': input_log_path,
                   'input_reference_path': input_reference_path},
            'out': {'output_report_path': output_report_path,
                    'output_snapshot_path': output_snapshot_path}
        }

        # Properties specific for BB
        self.properties = properties

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    def header(self) -> dict:
        return metadata('replay', {'snapshot': self.io_dict['in']['input_snapshot_path'],
                                   'log': self.io_dict['in']['input_log_path'],
                                   'reference': self.io_dict['in']['input_reference_path']})

    def verify(self) -> dict:
        """Replays the log and compares with the reference; errors become a FAIL verdict."""
        inputs = self.stage_io_dict['in']
        report = {'verdict': 'FAIL', 'error': None, 'events': None, 'request_count': None,
                  'checksum': None, 'reference_checksum': None, 'system_alive': None, 'best_prefixes': None}
        try:
            base = load_snapshot(inputs['input_snapshot_path'])
            state = replay(base, inputs['input_log_path'], self.out_log)
            report.update({'events': state.request_count - base.request_count,
                           'request_count': state.request_count, 'checksum': checksum(state.to_dict()),
                           'system_alive': system_alive(state), 'best_prefixes': state.best_prefixes()})
            matches = True
            if inputs.get('input_reference_path'):
                reference = load_snapshot(inputs['input_reference_path'])
                report['reference_checksum'] = checksum(reference.to_dict())
                matches = same_state(state, reference)
                if not matches:
                    report['error'] = 'replayed state differs from the reference snapshot'
            report['verdict'] = 'PASS' if matches else 'FAIL'
            if self.stage_io_dict['out'].get('output_snapshot_path'):
                save_snapshot(state, self.stage_io_dict['out']['output_snapshot_path'], metadata=self.header(), out_log=self.out_log)
        except UnlearningError as err:
            report['error'] = str(err)
        return report

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`ReplayLog <unlearning.replay_log.ReplayLog>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        report = self.verify()
        fu.log('Replay verdict: %s%s' % (report['verdict'], '' if report['error'] is None else ' (%s)' % report['error']), self.out_log)
        if report['verdict'] != 'PASS':
            self.return_code = VERIFICATION_FAILED
        write_json(self.stage_io_dict['out']['output_report_path'], self.header(), report)

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def replay_log(input_snapshot_path: str, input_log_path: str, output_report_path: str,
               input_reference_path: Optional[str] = None, output_snapshot_path: Optional[str] = None,
               properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`ReplayLog <unlearning.replay_log.ReplayLog>` class and
    execute :meth:`launch() <unlearning.replay_log.ReplayLog.launch>` method"""
    return ReplayLog(**dict(locals())).launch()


replay_log.__doc__ = ReplayLog.__doc__
main = ReplayLog.get_main(replay_log, "Rebuild and verify a state from a snapshot and its deletion log.")

if __name__ == '__main__':
    main()
