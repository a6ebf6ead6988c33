#!/usr/bin/env python3

"""Module containing the RetentionTable class and the command line interface."""
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.analytics import retention_point
from biobb_unlearning.unlearning.common import int_list, metadata, write_table

RETENTION_COLUMNS = ['L', 'B', 'k', 'r', 'b_eff', 'p_sisa', 'p_s3t', 'gap']


class RetentionTable(BiobbObject):
    """
    | biobb_unlearning RetentionTable
    | Closed-form performance retention of one shard.
    | Probability that the best surviving model of a shard still uses at least k slices after r deletion requests, for the single-sequence baseline and for B randomly chosen sequences, and the gap between both.

    Args:
        output_retention_path (str): One row per (k, r) point. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/retention.csv>`_. Accepted formats: csv (edam:format_3752), json (edam:format_3464).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **L** (*int*) - (4) [1~10000|1] Number of slices per shard.
            * **B** (*int*) - (1) [1~100000|1] Number of sequences trained per shard.
            * **ks** (*list*) - ([1]) Prefix lengths k, each in [1, L].
            * **rs** (*list*) - ([1]) Numbers of deletion requests r.
            * **output_format** (*str*) - (None) Output format. Values: csv, json. Taken from the output file extension when not set.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.retention_table import retention_table
            prop = {
                'L': 4,
                'B': 2,
                'ks': [1, 2, 3],
                'rs': [1, 2, 4, 8]
            }
            retention_table(output_retention_path='/path/to/retention.csv',
                            properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, output_retention_path: str, properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {},
            'out': {'output_retention_path': output_retention_path}
        }

        # Properties specific for BB
        self.properties = properties
        self.L = int(properties.get('L', 4))
        self.B = int(properties.get('B', 1))
        self.ks = int_list(properties.get('ks', [1]), 'ks')
        self.rs = int_list(properties.get('rs', [1]), 'rs')
        self.output_format = properties.get('output_format')

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`RetentionTable <unlearning.retention_table.RetentionTable>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        rows = []
        for k in self.ks:
            for r in self.rs:
                rows.append({'L': self.L, 'B': self.B, **retention_point(k, self.L, r, self.B).to_dict()})
        fu.log('%d retention points computed for L=%d, B=%d' % (len(rows), self.L, self.B), self.out_log)
        config = {'L': self.L, 'B': self.B, 'ks': self.ks, 'rs': self.rs}
        write_table(self.stage_io_dict['out']['output_retention_path'], metadata('retention', config),
                    RETENTION_COLUMNS, rows, self.output_format)

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def retention_table(output_retention_path: str, properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`RetentionTable <unlearning.retention_table.RetentionTable>` class and
    execute :meth:`launch() <unlearning.retention_table.RetentionTable.launch>` method"""
    return RetentionTable(**dict(locals())).launch()


retention_table.__doc__ = RetentionTable.__doc__
main = RetentionTable.get_main(retention_table, "Closed-form performance retention of a shard under deletions.")

if __name__ == '__main__':
    main()
