import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="biobb_unlearning",
    version="1.0.0",
    author="Biobb developers",
    author_email="adam.hospital@irbbarcelona.org",
    description="biobb_unlearning is a BioBB category for exact machine unlearning with sharded, sliced and sequence-trained model ensembles.",
    long_description="biobb_unlearning selects the slice sequences trained per shard, computes closed-form deletion rates and performance retention, simulates deletion requests and replays audited deletion logs.",
    long_description_content_type="text/markdown",
    keywords="Bioinformatics Workflows BioExcel Compatibility Machine Unlearning Sharding Monte Carlo Bipartite Matching",
    url="https://github.com/bioexcel/biobb_unlearning",
    project_urls={
        "Documentation": "http://biobb-unlearning.readthedocs.io/en/latest/",
        "Bioexcel": "https://bioexcel.eu/"
    },
    packages=setuptools.find_packages(exclude=['docs', 'test']),
    package_data={'biobb_unlearning': ['py.typed']},
    include_package_data=True,
    install_requires=['biobb_common==5.2.2', 'numpy', 'scipy'],
    python_requires='>=3.10',
    entry_points={
        "console_scripts": [
            "s3t = biobb_unlearning.unlearning.s3t_cli:run",
            "partition_dataset = biobb_unlearning.unlearning.partition_dataset:main",
            "select_sequences = biobb_unlearning.unlearning.select_sequences:main",
            "score_sequences = biobb_unlearning.unlearning.score_sequences:main",
            "deletion_bounds = biobb_unlearning.unlearning.deletion_bounds:main",
            "retention_table = biobb_unlearning.unlearning.retention_table:main",
            "init_system = biobb_unlearning.unlearning.init_system:main",
            "apply_deletions = biobb_unlearning.unlearning.apply_deletions:main",
            "replay_log = biobb_unlearning.unlearning.replay_log:main",
            "simulate_deletions = biobb_unlearning.unlearning.simulate_deletions:main",
            "compare_systems = biobb_unlearning.unlearning.compare_systems:main"
        ]
    },
    classifiers=[
        "Development Status :: 5 - Production/Stable",
        "Programming Language :: Python :: 3.10",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: POSIX",
        "Operating System :: Unix"
    ],
)
