#!/usr/bin/env python3

"""Module containing the DeletionBounds class and the command line interface."""
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.analytics import bound_report
from biobb_unlearning.unlearning.common import int_list, metadata, write_table

BOUND_COLUMNS = ['m', 'L', 'B', 'b_prime', 'sisa_bound', 's3t_bound', 's3t_asymptotic']


class DeletionBounds(BiobbObject):
    """
    | biobb_unlearning DeletionBounds
    | Closed-form deletion rates of the sharded ensemble.
    | Expected number of deletion requests until every shard has lost all its model variants, for the single-sequence baseline (m*L*H(m)) and for a budget of B sequences (m*L*H(m*min(B, L))), with the logarithmic approximation alongside.

    Args:
        output_bounds_path (str): One row per budget. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/bounds.csv>`_. Accepted formats: csv (edam:format_3752), json (edam:format_3464).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **m** (*int*) - (5) [1~10000|1] Number of shards.
            * **L** (*int*) - (4) [1~10000|1] Number of slices per shard.
            * **B** (*list*) - ([1]) Budget or list of budgets, one output row each.
            * **output_format** (*str*) - (None) Output format. Values: csv, json. Taken from the output file extension when not set.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.deletion_bounds import deletion_bounds
            prop = {
                'm': 5,
                'L': 32,
                'B': [1, 2, 4, 8, 16, 32]
            }
            deletion_bounds(output_bounds_path='/path/to/bounds.csv',
                            properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, output_bounds_path: str, properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {},
            'out': {'output_bounds_path': output_bounds_path}
        }

        # Properties specific for BB
        self.properties = properties
        self.m = int(properties.get('m', 5))
        self.L = int(properties.get('L', 4))
        self.budgets = int_list(properties.get('B', [1]), 'B')
        self.output_format = properties.get('output_format')

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`DeletionBounds <unlearning.deletion_bounds.DeletionBounds>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        rows = [bound_report(self.m, self.L, B).to_dict() for B in self.budgets]
        for row in rows:
            fu.log('m=%d L=%d B=%d: sisa %.4f, s3t %.4f' % (row['m'], row['L'], row['B'], row['sisa_bound'], row['s3t_bound']), self.out_log)
        config = {'m': self.m, 'L': self.L, 'B': self.budgets}
        write_table(self.stage_io_dict['out']['output_bounds_path'], metadata('bounds', config),
                    BOUND_COLUMNS, rows, self.output_format)

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def deletion_bounds(output_bounds_path: str, properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`DeletionBounds <unlearning.deletion_bounds.DeletionBounds>` class and
    execute :meth:`launch() <unlearning.deletion_bounds.DeletionBounds.launch>` method"""
    return DeletionBounds(**dict(locals())).launch()


deletion_bounds.__doc__ = DeletionBounds.__doc__
main = DeletionBounds.get_main(deletion_bounds, "Closed-form deletion rates of the sharded unlearning ensemble.")

if __name__ == '__main__':
    main()
