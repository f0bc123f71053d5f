"""adforge: attack-defense tree workbench.

Generate trees through an LLM flow, score their quality, and compile
branches into security chaos experiments run against a mock cloud.
"""

__version__ = "0.1.0"

from .dot import emit_dot, parse_dot
from .metrics import (
    MetricReport,
    ReferenceOrder,
    TechniqueCatalog,
    mitre_score,
    ordered_score,
    tree_score,
    usable_score,
)
from .model import (
    ADNode,
    ADTree,
    Branch,
    NodeKind,
    StyleSheet,
    extract_branch,
    merge_trees,
    trees_equal,
)

__all__ = [
    "ADNode",
    "ADTree",
    "Branch",
    "MetricReport",
    "NodeKind",
    "ReferenceOrder",
    "StyleSheet",
    "TechniqueCatalog",
    "emit_dot",
    "extract_branch",
    "merge_trees",
    "mitre_score",
    "ordered_score",
    "parse_dot",
    "tree_score",
    "trees_equal",
    "usable_score",
    "__version__",
]
