#!/usr/bin/env python3

"""Module containing the SimulateDeletions class and the command line interface."""
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.analytics import sisa_deletion_bound
from biobb_unlearning.s3t.core import InvalidInputError
from biobb_unlearning.s3t.montecarlo import estimate_deletion_rate, retention_curve
from biobb_unlearning.unlearning.common import (int_list, metadata, read_json, read_prior, trial_configs,
                                                trial_overrides, write_table)

ANALYSES = ('deletion_rate', 'retention')
RATE_COLUMNS = ['name', 'mode', 'plan_source', 'm', 'L', 'B', 'prior_spec', 'granularity', 'failure', 'trials', 'seed',
                'mean', 'ci95', 'bound', 'sisa_bound', 'censored']
RETENTION_COLUMNS = ['name', 'mode', 'plan_source', 'L', 'B', 'k', 'r', 'b_eff', 'p_sisa', 'p_s3t', 'gap',
                     'empirical', 'stderr', 'trials', 'seed']


class SimulateDeletions(BiobbObject):
    """
    | biobb_unlearning SimulateDeletions
    | Monte Carlo simulation of deletion requests.
    | Drives the unlearning engine with sampled deletion requests. The deletion_rate analysis counts the requests served until the system must be retrained and reports the mean, its 95% confidence half width and the closed-form bound of every configuration; a list of budgets B runs one configuration per budget. The retention analysis estimates, for one shard, the probability that the best model still uses at least k slices after r deletions, next to the closed forms.

    Args:
        input_config_path (str) (Optional): JSON trial configuration (or list of configurations) with the same field names as the properties below. Properties explicitly set override the file. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/simulate.json>`_. Accepted formats: json (edam:format_3464).
        input_prior_path (str) (Optional): Explicit deletion prior, one vector for all shards or one per shard. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/prior.json>`_. Accepted formats: json (edam:format_3464).
        output_results_path (str): Simulation results. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/simulate.csv>`_. Accepted formats: csv (edam:format_3752), json (edam:format_3464).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **analysis** (*str*) - ("deletion_rate") Quantity to estimate. Values: deletion_rate (requests until retraining), retention (best-prefix retention of one shard).
            * **m** (*int*) - (None) [1~10000|1] Number of shards.
            * **L** (*int*) - (None) [1~10000|1] Number of slices per shard.
            * **B** (*list*) - (None) Budget or list of budgets.
            * **mode** (*str*) - ("s3t") Training scheme. Values: s3t, sisa.
            * **plan_source** (*str*) - ("cyclic") Sequence selection. Values: cyclic, bms, conditional, sorted-cyclic, random.
            * **prior_spec** (*str*) - ("uniform") Deletion prior. Values: uniform, dirichlet, explicit.
            * **alpha** (*float*) - (1.0) [0~1000|0.1] Concentration of the Dirichlet prior.
            * **granularity** (*str*) - ("slice") Request sampling. Values: slice (shard and slice drawn with replacement), item (items deleted in random order).
            * **n_items** (*int*) - (None) [1~100000000|1] Dataset size for item granularity.
            * **failure** (*str*) - ("all-shards") Retraining condition. Values: all-shards, any-shard.
            * **trials** (*int*) - (10000) [1~10000000|1] Number of independent trials.
            * **seed** (*int*) - (0) [0~4294967295|1] Master seed; trial i uses the stream derived from (seed, i).
            * **t** (*int*) - (10) [0~100000|1] Horizon of the sequence score used by bms.
            * **jobs** (*int*) - (1) [1~256|1] Worker processes. Results do not depend on it.
            * **ks** (*list*) - ([1]) Prefix lengths k of the retention analysis.
            * **rs** (*list*) - ([1]) Numbers of deletions r of the retention analysis.
            * **output_format** (*str*) - (None) Output format. Values: csv, json. Taken from the output file extension when not set.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.simulate_deletions import simulate_deletions
            prop = {
                'm': 5,
                'L': 32,
                'B': [1, 2, 4, 8, 16, 32],
                'trials': 10000,
                'seed': 0
            }
            simulate_deletions(output_results_path='/path/to/simulate.csv',
                               properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, output_results_path: str, input_config_path: Optional[str] = None,
                 input_prior_path: Optional[str] = None, properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {'input_config_path': input_config_path,
                   'input_prior_path': input_prior_path},
            'out': {'output_results_path': output_results_path}
        }

        # Properties specific for BB
        self.properties = properties
        self.analysis = properties.get('analysis', 'deletion_rate')
        self.jobs = int(properties.get('jobs', 1))
        self.ks = int_list(properties.get('ks', [1]), 'ks')
        self.rs = int_list(properties.get('rs', [1]), 'rs')
        self.output_format = properties.get('output_format')
        self.overrides = trial_overrides(properties)

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    def rate_rows(self, configs: list) -> list:
        rows = []
        for config in configs:
            result = estimate_deletion_rate(config, self.jobs, self.out_log)
            rows.append({**config.to_dict(), 'name': config.name, 'mean': result.mean, 'ci95': result.ci95_halfwidth,
                         'bound': result.bound, 'sisa_bound': sisa_deletion_bound(config.m, config.L),
                         'censored': result.censored})
        return rows

    def retention_rows(self, configs: list) -> list:
        rows = []
        for config in configs:
            for row in retention_curve(config, self.ks, self.rs, self.out_log):
                rows.append({**config.to_dict(), 'name': config.name, **row.to_dict()})
        return rows

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`SimulateDeletions <unlearning.simulate_deletions.SimulateDeletions>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        if self.analysis not in ANALYSES:
            raise InvalidInputError(f"unknown analysis {self.analysis!r}, expected one of {ANALYSES}")
        inputs = self.stage_io_dict['in']
        data = read_json(inputs['input_config_path'], 'trial configuration') if inputs.get('input_config_path') else {}
        configs = trial_configs(data, self.overrides, read_prior(inputs.get('input_prior_path')))
        fu.log('%d configuration(s), analysis %s' % (len(configs), self.analysis), self.out_log)

        if self.analysis == 'deletion_rate':
            columns, rows = RATE_COLUMNS, self.rate_rows(configs)
        else:
            columns, rows = RETENTION_COLUMNS, self.retention_rows(configs)

        config = {'analysis': self.analysis, 'jobs': self.jobs, 'configs': [c.to_dict() for c in configs]}
        if self.analysis == 'retention':
            config.update({'ks': self.ks, 'rs': self.rs})
        seeds = sorted({c.seed for c in configs})
        write_table(self.stage_io_dict['out']['output_results_path'],
                    metadata('simulate', config, seeds[0] if len(seeds) == 1 else seeds),
                    columns, rows, self.output_format, {'results': rows})

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def simulate_deletions(output_results_path: str, input_config_path: Optional[str] = None,
                       input_prior_path: Optional[str] = None, properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`SimulateDeletions <unlearning.simulate_deletions.SimulateDeletions>` class and
    execute :meth:`launch() <unlearning.simulate_deletions.SimulateDeletions.launch>` method"""
    return SimulateDeletions(**dict(locals())).launch()


simulate_deletions.__doc__ = SimulateDeletions.__doc__
main = SimulateDeletions.get_main(simulate_deletions, "Monte Carlo simulation of deletion requests on a sharded unlearning ensemble.")

if __name__ == '__main__':
    main()
