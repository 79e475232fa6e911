"""Data-driven repair of competition-level C programs.

Learns program-transformation patterns (merge trees) from per-user
incorrect/corrected submission pairs and applies them to repair unseen
incorrect programs, validating every candidate against a judge that enforces
functional correctness plus time and memory limits.
"""

from .defuse import DefUseReport, def_use, visible_variables
from .distance import (
    CostModel,
    EditScript,
    TedResult,
    apply_script,
    learning_cost_model,
    ted,
    unit_cost_model,
)
from .judge import (
    CompilerConfig,
    JudgeInfrastructureError,
    Outcome,
    ResourceLimits,
    TestCase,
    TestSuite,
    Verdict,
    compile_source,
    judge,
    load_suite,
    run_test,
    save_suite,
)
from .nodes import Ast, Node, NodeKind, control_flow_nodes, node_count
from .parser import ParseError, parse
from .patterns import (
    AlignmentResult,
    FlatTree,
    MergeNode,
    MergeTree,
    MergeTreePool,
    augment,
    control_flow_align,
    flatten,
    learn_transformations,
    load_pool,
    merge,
    pool_merge,
    save_pool,
)
from .printer import to_source
from .repair import (
    Failure,
    MatchSite,
    RepairCandidate,
    Repaired,
    align_variables,
    apply_pattern,
    enumerate_candidates,
    filter_spurious,
    find_matches,
    repair,
)
from .corpus import (
    EvalReport,
    IngestError,
    SubmissionDb,
    SubmissionRecord,
    dissimilarity,
    evaluate,
    group_users,
    ingest,
    is_high_quality,
    make_pairs,
    relative_repair_size,
    split_users,
)

__version__ = "0.1.0"
