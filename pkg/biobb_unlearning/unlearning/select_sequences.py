#!/usr/bin/env python3

"""Module containing the SelectSequences class and the command line interface."""
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.selection import DEFAULT_HORIZON, avg_pairwise_diversity, select_plan, total_score
from biobb_unlearning.s3t.core import DeletionPrior
from biobb_unlearning.unlearning.common import first_prior, metadata, read_prior, write_table

PLAN_COLUMNS = ['index', 'sequence', 'score', 'avg_pairwise_diversity']


class SelectSequences(BiobbObject):
    """
    | biobb_unlearning SelectSequences
    | Select the B slice sequences trained per shard.
    | Runs one of the budgeted selection methods (cyclic rotation, bipartite-matching selection, conditional sampling, sorted cyclic rotation or uniform random) and reports every sequence with its score and the average pairwise positional diversity of the plan.

    Args:
        input_prior_path (str) (Optional): Deletion prior, a JSON vector of L probabilities. Required by the bms, conditional and sorted-cyclic methods. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/prior.json>`_. Accepted formats: json (edam:format_3464).
        output_plan_path (str): Selected plan with per-sequence scores. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/plan.json>`_. Accepted formats: json (edam:format_3464), csv (edam:format_3752).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **L** (*int*) - (4) [1~64|1] Number of slices per shard.
            * **B** (*int*) - (1) [1~100000|1] Number of sequences to select (budget).
            * **method** (*str*) - ("cyclic") Selection method. Values: cyclic (iterative cyclic rotation, uniform prior), bms (bipartite matching based selection), conditional (conditional sampling), sorted-cyclic (rotations of the prior-sorted sequence), random (uniformly random distinct sequences).
            * **t** (*int*) - (10) [0~100000|1] Number of future deletions the sequence score is computed for.
            * **seed** (*int*) - (0) [0~4294967295|1] Seed of the randomized methods.
            * **output_format** (*str*) - (None) Output format. Values: json, csv. Taken from the output file extension when not set.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.select_sequences import select_sequences
            prop = {
                'L': 4,
                'B': 4,
                'method': 'bms',
                't': 10
            }
            select_sequences(input_prior_path='/path/to/prior.json',
                             output_plan_path='/path/to/plan.json',
                             properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, output_plan_path: str, input_prior_path: Optional[str] = None,
                 properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {'input_prior_path': input_prior_path},
            'out': {'output_plan_path': output_plan_path}
        }

        # Properties specific for BB
        self.properties = properties
        self.L = int(properties.get('L', 4))
        self.B = int(properties.get('B', 1))
        self.method = properties.get('method', 'cyclic')
        self.t = int(properties.get('t', DEFAULT_HORIZON))
        self.seed = int(properties.get('seed', 0))
        self.output_format = properties.get('output_format')

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`SelectSequences <unlearning.select_sequences.SelectSequences>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        prior = first_prior(read_prior(self.stage_io_dict['in'].get('input_prior_path'), self.L))
        plan = select_plan(self.method, self.L, self.B, prior, self.t, self.seed, out_log=self.out_log)
        scoring_prior = prior or DeletionPrior.uniform(self.L)
        plan_data = plan.to_dict(scoring_prior, self.t)
        diversity = avg_pairwise_diversity(plan) if plan.B > 1 else None
        plan_data.update({'L': self.L, 'B': plan.B, 'seed': self.seed,
                          'total_score': total_score(plan, scoring_prior, self.t),
                          'avg_pairwise_diversity': diversity})
        fu.log('Plan total score: %.6f, average pairwise diversity: %s' % (plan_data['total_score'], diversity), self.out_log)

        rows = [{'index': i, 'sequence': seq, 'score': score, 'avg_pairwise_diversity': diversity}
                for i, (seq, score) in enumerate(zip(plan_data['sequences'], plan_data['scores']))]
        config = {'L': self.L, 'B': self.B, 'method': self.method, 't': self.t,
                  'prior': None if prior is None else prior.to_list()}
        write_table(self.stage_io_dict['out']['output_plan_path'], metadata('select', config, self.seed),
                    PLAN_COLUMNS, rows, self.output_format, {'plan': plan_data})

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def select_sequences(output_plan_path: str, input_prior_path: Optional[str] = None,
                     properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`SelectSequences <unlearning.select_sequences.SelectSequences>` class and
    execute :meth:`launch() <unlearning.select_sequences.SelectSequences.launch>` method"""
    return SelectSequences(**dict(locals())).launch()


select_sequences.__doc__ = SelectSequences.__doc__
main = SelectSequences.get_main(select_sequences, "Select the slice sequences trained per shard under a budget.")

if __name__ == '__main__':
    main()
