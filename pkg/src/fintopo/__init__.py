"""Continuity structure of maps between finite topological spaces,
with a countable tree-space class, an exhaustive law verifier and a
counterexample miner."""

from .finspace import (
    CanonicalForm,
    CantorBendixson,
    FiniteSpace,
    PointSet,
    SpaceProperties,
    canonical_form,
    cantor_bendixson,
    closed_chain_length,
    large_pseudocharacter,
    paracompactness_number,
    properties,
    space_product,
    space_sum,
    subspace,
)
from .mapcalc import (
    Cardinality,
    CoverResult,
    FiniteMap,
    SeriesReport,
    WellOrderWitness,
    ac_qc_sets,
    check_composition_bounds,
    compose,
    continuity_set,
    dec_arbitrary,
    dec_closed,
    discontinuity_set,
    gdelta_measurable,
    is_continuous,
    ordinal_product,
    restrict,
    sc_bruteforce,
    sc_series,
    verify_vanishing_series,
    wd_bruteforce,
    wd_series,
    well_order_witness,
    witness_verifies,
)
from .miner import (
    EnumerationTask,
    Finding,
    MinerReport,
    enumerate_maps,
    enumerate_spaces,
    mine,
    verify_suite,
)
from .treespace import (
    ShapeSet,
    StableSequenceDescription,
    ThresholdMap,
    TreeSpace,
    TruncatedModel,
    stable_sequence_cover,
    tree_closure,
    tree_dec_closed,
    tree_decomposition,
    tree_discontinuity_set,
    tree_interior,
    tree_measurability_certificate,
    tree_series,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
