"""Recover bijective coarse equivalences from spatial isomorphisms of uniform Roe algebras."""

from ._roe import (
    Iso,
    Map,
    RoeError,
    Space,
    block_norm,
    closeness,
    compose,
    conditional_expectation,
    csb_combine,
    cycle,
    extract,
    flattened_indicator,
    generate,
    goal_csv,
    grid,
    numerical_rank,
    op_norm,
    path,
    propagation,
    quasi_local_profile,
    selftest,
    so_variation,
)

__all__ = [
    "Iso",
    "Map",
    "RoeError",
    "Space",
    "block_norm",
    "closeness",
    "compose",
    "conditional_expectation",
    "csb_combine",
    "cycle",
    "extract",
    "flattened_indicator",
    "generate",
    "goal_csv",
    "grid",
    "numerical_rank",
    "op_norm",
    "path",
    "propagation",
    "quasi_local_profile",
    "selftest",
    "so_variation",
]
