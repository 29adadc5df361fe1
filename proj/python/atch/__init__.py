"""Python access to the ATCH temporal causal hypergraph engine."""

from ._atch import (
    AtchError,
    Snapshot,
    Store,
    active_defaults,
    ambiguity_bits,
    at_time,
    blast_radius,
    build_chain,
    count_preimages,
    discover,
    during,
    effective_depth,
    fixture,
    is_acyclic,
    noisy_or,
    query,
    resolve,
    run_cli,
    trace,
)

__all__ = [
    "AtchError",
    "Snapshot",
    "Store",
    "active_defaults",
    "ambiguity_bits",
    "at_time",
    "blast_radius",
    "build_chain",
    "count_preimages",
    "discover",
    "during",
    "effective_depth",
    "fixture",
    "is_acyclic",
    "noisy_or",
    "query",
    "resolve",
    "run_cli",
    "trace",
]
