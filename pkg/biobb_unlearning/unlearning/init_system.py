#!/usr/bin/env python3

"""Module containing the InitSystem class and the command line interface."""
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.core import DeletionPrior
from biobb_unlearning.s3t.engine import initialize
from biobb_unlearning.s3t.registry import load_manifest, save_snapshot
from biobb_unlearning.s3t.selection import DEFAULT_HORIZON
from biobb_unlearning.unlearning.common import metadata, read_prior
from biobb_unlearning.unlearning.score_sequences import read_plan


class InitSystem(BiobbObject):
    """
    | biobb_unlearning InitSystem
    | Create the initial state of a sharded unlearning ensemble.
    | Selects B slice sequences per shard (or takes an explicit plan), trains every variant on all its slices and writes the resulting state as a checksummed snapshot.

    Args:
        input_manifest_path (str) (Optional): Partition manifest, enables deletions by item id. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/manifest.json>`_. Accepted formats: json (edam:format_3464).
        input_prior_path (str) (Optional): Deletion prior, one vector for all shards or one vector per shard. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/prior.json>`_. Accepted formats: json (edam:format_3464).
        input_plan_path (str) (Optional): Explicit plan used for every shard when plan_source is explicit. File type: input. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/data/unlearning/plan.json>`_. Accepted formats: json (edam:format_3464).
        output_snapshot_path (str): Snapshot of the initial state. File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/init.s3t.json>`_. Accepted formats: json (edam:format_3464).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **m** (*int*) - (5) [1~10000|1] Number of shards.
            * **L** (*int*) - (4) [1~10000|1] Number of slices per shard.
            * **B** (*int*) - (1) [1~100000|1] Number of sequences trained per shard.
            * **mode** (*str*) - ("s3t") Training scheme. Values: s3t (B sequences per shard), sisa (one identity sequence per shard, B must be 1).
            * **plan_source** (*str*) - ("cyclic") Sequence selection. Values: cyclic, bms, conditional, sorted-cyclic, random, explicit.
            * **t** (*int*) - (10) [0~100000|1] Horizon of the sequence score used by bms.
            * **failure** (*str*) - ("all-shards") Retraining condition. Values: all-shards (every shard lost all variants), any-shard (some shard lost all variants).
            * **seed** (*int*) - (0) [0~4294967295|1] Seed of the randomized selection methods.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.init_system import init_system
            prop = {
                'm': 3,
                'L': 4,
                'B': 4,
                'plan_source': 'cyclic'
            }
            init_system(output_snapshot_path='/path/to/init.s3t.json',
                        properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, output_snapshot_path: str, input_manifest_path: Optional[str] = None,
                 input_prior_path: Optional[str] = None, input_plan_path: Optional[str] = None,
                 properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {'input_manifest_path': input_manifest_path,
                   'input_prior_path': input_prior_path,
                   'input_plan_path': input_plan_path},
            'out': {'output_snapshot_path': output_snapshot_path}
        }

        # Properties specific for BB
        self.properties = properties
        self.m = int(properties.get('m', 5))
        self.L = int(properties.get('L', 4))
        self.B = int(properties.get('B', 1))
        self.mode = properties.get('mode', 's3t')
        self.plan_source = properties.get('plan_source', 'cyclic')
        self.t = int(properties.get('t', DEFAULT_HORIZON))
        self.failure = properties.get('failure', 'all-shards')
        self.seed = int(properties.get('seed', 0))

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`InitSystem <unlearning.init_system.InitSystem>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        inputs = self.stage_io_dict['in']
        manifest = load_manifest(inputs['input_manifest_path']) if inputs.get('input_manifest_path') else None
        prior = read_prior(inputs.get('input_prior_path'), self.L)
        plans = read_plan(inputs['input_plan_path']) if inputs.get('input_plan_path') else None
        state = initialize(self.m, self.L, self.B, self.mode, self.plan_source, prior, manifest, self.seed,
                           plans, self.t, self.failure, out_log=self.out_log)
        for shard in state.shards:
            fu.log('Shard %d sequences: %s' % (shard.shard, [v.perm.to_list() for v in shard.variants]), self.out_log)

        prior_values = prior.to_list() if isinstance(prior, DeletionPrior) else prior and [p.to_list() for p in prior]
        config = {'m': self.m, 'L': self.L, 'B': self.B, 'mode': self.mode, 'plan_source': self.plan_source,
                  't': self.t, 'failure': self.failure, 'prior': prior_values,
                  'plans': [[v.perm.to_list() for v in shard.variants] for shard in state.shards]}
        save_snapshot(state, self.stage_io_dict['out']['output_snapshot_path'],
                      metadata=metadata('init', config, self.seed), out_log=self.out_log)

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def init_system(output_snapshot_path: str, input_manifest_path: Optional[str] = None,
                input_prior_path: Optional[str] = None, input_plan_path: Optional[str] = None,
                properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`InitSystem <unlearning.init_system.InitSystem>` class and
    execute :meth:`launch() <unlearning.init_system.InitSystem.launch>` method"""
    return InitSystem(**dict(locals())).launch()


init_system.__doc__ = InitSystem.__doc__
main = InitSystem.get_main(init_system, "Create the initial state of a sharded unlearning ensemble.")

if __name__ == '__main__':
    main()
