#!/usr/bin/env python3

"""Module containing the CompareSystems class and the command line interface."""
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.core import InvalidInputError
from biobb_unlearning.s3t.montecarlo import compare
from biobb_unlearning.unlearning.common import metadata, read_json, trial_configs, write_table

COMPARE_COLUMNS = ['name', 'mode', 'plan_source', 'm', 'L', 'B', 'prior_spec', 'trials', 'seed',
                   'mean', 'ci95', 'bound', 'ratio']
SHARED_FIELDS = ('trials', 'seed', 'failure', 'granularity', 'n_items')


class CompareSystems(BiobbObject):
    """
    | biobb_unlearning CompareSystems
    | Compare the deletion rates of several unlearning systems.
    | Runs the Monte Carlo deletion-rate estimate for every configuration and reports the means side by side with their confidence half widths, closed-form bounds and the ratio of every mean to the mean of the first configuration.

    Args:
        input_config_path (str): JSON list of trial configurations; the first one is the baseline of the ratios. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/compare.json>`_. Accepted formats: json (edam:format_3464).
        output_comparison_path (str): One row per configuration. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/compare.csv>`_. Accepted formats: csv (edam:format_3752), json (edam:format_3464).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **trials** (*int*) - (None) [1~10000000|1] Number of trials, overrides every configuration.
            * **seed** (*int*) - (None) [0~4294967295|1] Master seed, overrides every configuration.
            * **failure** (*str*) - (None) Retraining condition, overrides every configuration. Values: all-shards, any-shard.
            * **granularity** (*str*) - (None) Request sampling, overrides every configuration. Values: slice, item.
            * **n_items** (*int*) - (None) [1~100000000|1] Dataset size for item granularity, overrides every configuration.
            * **jobs** (*int*) - (1) [1~256|1] Worker processes. Results do not depend on it.
            * **output_format** (*str*) - (None) Output format. Values: csv, json. Taken from the output file extension when not set.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.compare_systems import compare_systems
            prop = {
                'trials': 10000,
                'seed': 0,
                'jobs': 4
            }
            compare_systems(input_config_path='/path/to/compare.json',
                            output_comparison_path='/path/to/compare.csv',
                            properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, input_config_path: str, output_comparison_path: str,
                 properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {'input_config_path': input_config_path},
            'out': {'output_comparison_path': output_comparison_path}
        }

        # Properties specific for BB
        self.properties = properties
        self.jobs = int(properties.get('jobs', 1))
        self.output_format = properties.get('output_format')
        self.overrides = {key: properties[key] for key in SHARED_FIELDS if properties.get(key) is not None}

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`CompareSystems <unlearning.compare_systems.CompareSystems>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        data = read_json(self.stage_io_dict['in']['input_config_path'], 'comparison configuration')
        if isinstance(data, dict):
            data = data.get('configs')
        if not isinstance(data, list) or not data:
            raise InvalidInputError("a comparison needs a non-empty list of configurations")
        configs = trial_configs(data, self.overrides)
        comparison = compare(configs, self.jobs, self.out_log)
        for row in comparison:
            fu.log('%s: mean %.4f, ratio %.4f' % (row.name, row.mean, row.ratio), self.out_log)

        rows = [{**row.result.config.to_dict(), **row.to_dict()} for row in comparison]
        config = {'jobs': self.jobs, 'configs': [c.to_dict() for c in configs]}
        seeds = sorted({c.seed for c in configs})
        write_table(self.stage_io_dict['out']['output_comparison_path'],
                    metadata('compare', config, seeds[0] if len(seeds) == 1 else seeds),
                    COMPARE_COLUMNS, rows, self.output_format, {'comparison': [row.to_dict() for row in comparison]})

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def compare_systems(input_config_path: str, output_comparison_path: str,
                    properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`CompareSystems <unlearning.compare_systems.CompareSystems>` class and
    execute :meth:`launch() <unlearning.compare_systems.CompareSystems.launch>` method"""
    return CompareSystems(**dict(locals())).launch()


compare_systems.__doc__ = CompareSystems.__doc__
main = CompareSystems.get_main(compare_systems, "Compare the deletion rates of several unlearning systems.")

if __name__ == '__main__':
    main()
