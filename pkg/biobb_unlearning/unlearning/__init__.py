from . import common
from . import partition_dataset
from . import select_sequences
from . import score_sequences
from . import deletion_bounds
from . import retention_table
from . import init_system
from . import apply_deletions
from . import replay_log
from . import simulate_deletions
from . import compare_systems
from . import s3t_cli

name = "unlearning"
__all__ = ["partition_dataset", "select_sequences", "score_sequences", "deletion_bounds", "retention_table", "init_system", "apply_deletions", "replay_log", "simulate_deletions", "compare_systems", "s3t_cli"]
