"""Homomorphism-based compression of fuzzy relation systems, with incremental updates."""

from .core import (
    Block,
    FuzzyRelation,
    FuzzyValueError,
    InvalidSystemError,
    ObjectId,
    Partition,
    RelationSystem,
    UnknownObjectError,
    check_system,
    fuzzy_value,
    make_universe,
    validate_system,
)
from .dynamics import (
    CompressionState,
    EditError,
    ObjectExtension,
    add_objects,
    add_relations,
    compress_state,
    equivalent,
    remove_objects,
    remove_relations,
    scratch_oracle,
)
from .homomorphism import (
    CompressedSystem,
    QuotientMap,
    compress,
    image_relation,
    inverse_image_relation,
    is_consistent,
    quotient_map,
)
from .partitioning import (
    PartitionCache,
    count_partitions,
    meet,
    meet_all,
    row_partition,
    strict_partition,
    system_partition,
)
from .reduction import is_superfluous, lift_reduct, meet_relation, reduce_compressed, reducts

__version__ = "0.1.0"
