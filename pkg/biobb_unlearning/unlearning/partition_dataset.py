#!/usr/bin/env python3

"""Module containing the PartitionDataset class and the command line interface."""
from typing import Optional
from biobb_common.tools import file_utils as fu
from biobb_common.generic.biobb_object import BiobbObject
from biobb_common.tools.file_utils import launchlogger
from biobb_unlearning.s3t.core import partition
from biobb_unlearning.s3t.registry import save_manifest
from biobb_unlearning.unlearning.common import metadata


class PartitionDataset(BiobbObject):
    """
    | biobb_unlearning PartitionDataset
    | Split a dataset into shards and slices.
    | Assigns the item ids 0..n_items-1 to m shards of L slices each, filling the m*L slots cyclically (optionally after a seeded shuffle) so that slice sizes differ by at most one item.

    Args:
        output_manifest_path (str): Partition manifest mapping every item id to its (shard, slice). File type: output. `Sample file <https://github.com/bioexcel/biobb_unlearning/raw/master/biobb_unlearning/test/reference/unlearning/manifest.json>`_. Accepted formats: json (edam:format_3464).
        properties (dict - Python dictionary object containing the tool parameters, not input/output files):
            * **n_items** (*int*) - (100) [1~100000000|1] Number of items of the dataset.
            * **m** (*int*) - (5) [1~10000|1] Number of shards.
            * **L** (*int*) - (4) [1~10000|1] Number of slices per shard.
            * **policy** (*str*) - ("round-robin") Assignment policy. Values: round-robin (item ids in order), seeded-uniform (item ids shuffled with the seed first).
            * **seed** (*int*) - (0) [0~4294967295|1] Seed of the seeded-uniform policy.
            * **remove_tmp** (*bool*) - (True) [WF property] Remove temporal files.
            * **restart** (*bool*) - (False) [WF property] Do not execute if output files exist.
            * **sandbox_path** (*str*) - ("./") [WF property] Parent path to the sandbox directory.

    Examples:
        This is a use example of how to use the building block from Python::

            from biobb_unlearning.unlearning.partition_dataset import partition_dataset
            prop = {
                'n_items': 1000,
                'm': 5,
                'L': 4,
                'policy': 'seeded-uniform',
                'seed': 7
            }
            partition_dataset(output_manifest_path='/path/to/manifest.json',
                              properties=prop)

    Info:
        * wrapped_software:
            * name: In house
            * license: Apache-2.0
        * ontology:
            * name: EDAM
            * schema: http://edamontology.org/EDAM.owl

    """

    def __init__(self, output_manifest_path: str, properties: Optional[dict] = None, **kwargs) -> None:

        properties = properties or {}

        # Call parent class constructor
        super().__init__(properties)
        self.locals_var_dict = locals().copy()

        # Input/Output files
        self.io_dict = {
            'in': {},
            'out': {'output_manifest_path': output_manifest_path}
        }

        # Properties specific for BB
        self.properties = properties
        self.n_items = int(properties.get('n_items', 100))
        self.m = int(properties.get('m', 5))
        self.L = int(properties.get('L', 4))
        self.policy = properties.get('policy', 'round-robin')
        self.seed = int(properties.get('seed', 0))

        # Check the properties
        self.check_properties(properties)
        self.check_arguments()

    @launchlogger
    def launch(self) -> int:
        """Execute the :class:`PartitionDataset <unlearning.partition_dataset.PartitionDataset>` object."""

        # Setup Biobb
        if self.check_restart():
            return 0
        self.stage_files()

        manifest = partition(self.n_items, self.m, self.L, self.policy, self.seed)
        sizes = [size for shard in manifest.slice_sizes for size in shard]
        fu.log('Partitioned %d items into %d shards x %d slices (slice sizes %d..%d)' % (self.n_items, self.m, self.L, min(sizes), max(sizes)), self.out_log)
        config = {'n_items': self.n_items, 'm': self.m, 'L': self.L, 'policy': self.policy}
        digest = save_manifest(manifest, self.stage_io_dict['out']['output_manifest_path'], metadata('partition', config, self.seed))
        fu.log('Manifest checksum: %s' % digest, self.out_log)

        # Copy files to host
        self.copy_to_host()

        # Remove temporary folder(s)
        self.remove_tmp_files()
        self.check_arguments(output_files_created=True, raise_exception=False)

        return self.return_code


def partition_dataset(output_manifest_path: str, properties: Optional[dict] = None, **kwargs) -> int:
    """Create :class:`PartitionDataset <unlearning.partition_dataset.PartitionDataset>` class and
    execute :meth:`launch() <unlearning.partition_dataset.PartitionDataset.launch>` method"""
    return PartitionDataset(**dict(locals())).launch()


partition_dataset.__doc__ = PartitionDataset.__doc__
main = PartitionDataset.get_main(partition_dataset, "Split a dataset into shards and slices.")

if __name__ == '__main__':
    main()
