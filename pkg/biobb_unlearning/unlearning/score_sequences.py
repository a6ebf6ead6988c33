#!/usr/bin/env python3

"""Module containing the ScoreSequences class and the command line interface."""
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.core import DeletionPrior, InvalidInputError
from biobb_unlearning.s3t.selection import DEFAULT_HORIZON, SelectionPlan, avg_pairwise_diversity, is_position_diverse, plan_scores
from biobb_unlearning.unlearning.common import first_prior, metadata, read_json, read_prior, write_table

SCORE_COLUMNS = ['index', 'sequence', 'score']


def read_plan(path: str) -> SelectionPlan:
    """Reads a plan written by select_sequences, a ``{"sequences": [...]}`` object or a bare list of sequences."""
    data = read_json(path, 'plan file')
    if isinstance(data, dict) and 'plan' in data:
        data = data['plan']
    if isinstance(data, list):
        data = {'sequences': data}
    if not isinstance(data, dict):
        raise InvalidInputError(f"invalid plan file {path}")
    return SelectionPlan.from_dict({'sequences': data.get('sequences'), 'method': 'explicit'})


class ScoreSequences(BiobbObject):
    """
    | biobb_unlearning ScoreSequences
    | Score a given set of slice sequences.
    | Computes, for every sequence of a plan, the expected number of functioning slices after t deletion requests drawn from the deletion prior, together with the total score and the average pairwise positional diversity of the plan.

    Args:
        input_plan_path (str): Plan to score, as written by select_sequences or a JSON list of sequences. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/plan.json>`_. Accepted formats: json (edam:format_3464).
        input_prior_path (str) (Optional): Deletion prior, a JSON vector of L probabilities. Uniform when omitted. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/prior.json>`_. Accepted formats: json (edam:format_3464).
        output_scores_path (str): Per-sequence scores. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/scores.csv>`_. Accepted formats: json (edam:format_3464), csv (edam:format_3752).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **t** (*int*) - (10) [0~100000|1] Number of future deletions the sequence score is computed for.
            * **output_format** (*str*) - (None) Output format. Values: json, csv. Taken from the output file extension when not set.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.score_sequences import score_sequences
            prop = {
                't': 10
            }
            score_sequences(input_plan_path='/path/to/plan.json',
                            input_prior_path='/path/to/prior.json',
                            output_scores_path='/path/to/scores.csv',
                            properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, input_plan_path: str, output_scores_path: str, input_prior_path: Optional[str] = None,
                 properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {'input_plan_path': input_plan_path, 'input_prior_path': input_prior_path},
            'out': {'output_scores_path': output_scores_path}
        }

        # Properties specific for BB
        self.properties = properties
        self.t = int(properties.get('t', DEFAULT_HORIZON))
        self.output_format = properties.get('output_format')

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`ScoreSequences <unlearning.score_sequences.ScoreSequences>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        plan = read_plan(self.stage_io_dict['in']['input_plan_path'])
        prior = first_prior(read_prior(self.stage_io_dict['in'].get('input_prior_path'), plan.L)) or DeletionPrior.uniform(plan.L)
        scores = plan_scores(plan, prior, self.t)
        diversity = avg_pairwise_diversity(plan) if plan.B > 1 else None
        fu.log('Scored %d sequences of length %d, total %.6f' % (plan.B, plan.L, sum(scores)), self.out_log)

        rows = [{'index': i, 'sequence': perm.to_list(), 'score': score} for i, (perm, score) in enumerate(zip(plan, scores))]
        payload = {'scores': rows, 'total_score': float(sum(scores)), 'avg_pairwise_diversity': diversity,
                   'position_diverse': is_position_diverse(plan.sequences)}
        config = {'L': plan.L, 'B': plan.B, 't': self.t, 'prior': prior.to_list()}
        write_table(self.stage_io_dict['out']['output_scores_path'], metadata('score', config),
                    SCORE_COLUMNS, rows, self.output_format, payload)

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def score_sequences(input_plan_path: str, output_scores_path: str, input_prior_path: Optional[str] = None,
                    properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`ScoreSequences <unlearning.score_sequences.ScoreSequences>` class and
    execute :meth:`launch() <unlearning.score_sequences.ScoreSequences.launch>` method"""
    return ScoreSequences(**dict(locals())).launch()


score_sequences.__doc__ = ScoreSequences.__doc__
main = ScoreSequences.get_main(score_sequences, "Score slice sequences under a deletion prior.")

if __name__ == '__main__':
    main()
