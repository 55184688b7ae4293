"""Scrambled Cantor schemes for concrete dynamical systems.

Builds finite Cantor scheme stages whose branch cells are pairwise
proximal yet recurrently separated, for the full shift, binary subshifts
of finite type, and the tent map; runs the fusion and splitting engines
behind those constructions; and emits exact-arithmetic certificates that
an independent verifier re-derives from scratch.
"""

from .core import (
    LiYorkeError,
    PreconditionError,
    canonical_s,
    density_witness,
    edge_in_cylinder,
    g0_involution,
    g0_related,
    is_g0_edge,
)
from .dyadic import format_dyadic, parse_dyadic, pow2
from .relations import (
    RFiltration,
    Verdict,
    liyorke_check,
    proximal_check,
    r_filtration_test,
    separation_check,
)
from .scheme import Scheme, ValidationReport, identity_scheme, validate_scheme
from .scrambler import (
    BlockPlan,
    ScrambleParams,
    epsilon_scramble_report,
    shift_scramble,
    tent_scramble,
    transversal_clique_pipeline,
)
from .fusion import (
    Approximation,
    Configuration,
    Exhausted,
    FusionOracle,
    check_compatible,
    check_one_step,
    fuse,
    initial_approximation,
    merge_configurations,
    mycielski_fuse,
)
from .systems import (
    Cell,
    DistBound,
    IntervalCell,
    SymbolicCell,
    SystemHandle,
    dist_cells,
    itinerary_cell,
    load_system_file,
    make_sft,
    make_shift,
    make_tent,
    orbit_cell,
    resolve_system,
    step_cell,
)
from .certificate import emit, load, verify

__version__ = "0.1.0"
