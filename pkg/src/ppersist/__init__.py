"""Exact persistent homology over posets, with semigroup orders and diagram commutants."""

from .linalg import F2, FieldSpec, Matrix, Q, SubspaceCoordinates, image_basis, inverse, nullspace_basis, rank, rref, solve
from .poset import (
    FinitePoset,
    PosetError,
    axis_poset,
    chain_poset,
    covers,
    downset,
    linear_extension,
    product_poset,
    upset,
    validate_poset,
)
from .semigroup import (
    FiniteSemigroup,
    NotAPartialOrder,
    idempotents,
    mitsch_order,
    nambooripad_order,
    semigroup_sublevel,
    sublevel_preimage,
    transformation_semigroup,
)
from .simplicial import (
    EMPTY,
    ChainComplex,
    Pair,
    SimplicialComplex,
    boundary_matrix,
    connecting_map,
    homology,
    induced_map,
    relative_homology,
    skeletal_chain_complex,
)
from .filtration import (
    DatasetMorphism,
    FilteredPair,
    GraphFamily,
    WeightedPointCloud,
    graph_sublevel_family,
    induced_vr_map,
    sublevel_filtration,
    vr_bifiltration,
    vr_filtration,
)
from .persistence import (
    INF,
    Barcode,
    PersistenceModule,
    barcode_1d,
    compare_barcodes,
    discretize_Z,
    filtration_barcode,
    find_isomorphism,
    interval_basis,
    module_from_filtration,
    persistent_range,
    range_module,
    rank_invariant,
    reconstruct_R,
)
from .diagrams import (
    Diagram,
    DiagramRep,
    EndRing,
    build_persistence_diagram,
    build_spectral_page,
    commutant_poset_rep,
    end_ring,
    evaluate_representation,
    graded_product,
    restrict_end_ring,
    validate_spectral_rep,
)

__version__ = "0.1.0"
