"""Mode entanglement of identical particles with superselection-respecting partial traces."""
from .bell import (
    BlochVector,
    ChshSettings,
    bell_like_state,
    chsh_value,
    chsh_value_fock,
    classical_chsh_bound,
    encode_qubit_basis,
    prepare_bell_like_state,
)
from .entanglement import (
    ghjw_connecting_unitary,
    ghjw_realize_ensemble,
    max_entropy_scan,
    n_fermion_state,
    schmidt_decompose,
    ssr_entropy,
    two_boson_entropy_closed_form,
    two_fermion_entropy_closed_form,
    two_mode_partition,
    two_mode_state,
    von_neumann_entropy,
)
from .errors import *  # noqa: F401,F403
from .fock import (
    BOSON,
    FERMION,
    FockVector,
    ModeLabel,
    ModeSpace,
    SingleParticleState,
    Statistics,
    determinant,
    inner_product,
    permanent,
    product_state,
    transition_amplitude,
)
from .locality import (
    DensityMatrix,
    check_c1,
    check_c2,
    factorize_bipartite,
    is_ssr_separable,
    local_product,
    partial_trace,
    partial_trace_nla,
    project_sector,
)
from .operators import (
    LocalState,
    annihilate,
    commutator_check,
    create,
    interior_product,
    local_inner_product,
)
from .partition import Partition
from .specfile import StateSpec

__version__ = "0.1.0"
