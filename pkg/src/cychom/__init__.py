"""cychom: exact chain-level machinery for group-algebra cyclic homology.

Groups with word metrics, sparse exact chains, the (b, B) bicomplex and
its truncated variants, weighted seminorms, growth-classified cochains,
and cyclic-cocycle pairing certificates.
"""

from .scalars import Enclosure, Scalar, format_scalar, parse_scalar
from .groups import (
    ConjClassId,
    DEFAULT_BALL_CAP,
    FiniteTableGroup,
    FreeAbelianGroup,
    FreeGroup,
    GroupElement,
    GroupRealization,
    ResourceCapExceeded,
    builtin_group,
    cyclic_group,
    direct_product,
    dump_group_doc,
    enumerate_tuples,
    free_abelian_group,
    free_group,
    group_eval,
    klein_four_group,
    load_group_doc,
    load_group_file,
    resolve_group,
    symmetric_group_3,
    tuple_total_length,
)
from .algebra import (
    AlgebraElement,
    Chain,
    InexactModulusError,
    NormParams,
    UnsupportedRealizationError,
    abs_coefficients,
    algebra_element_from_json,
    algebra_element_to_json,
    amax_seminorm,
    chain_from_json,
    chain_to_json,
    check_unconditional,
    convolve,
    nu_lambda,
    read_chain_file,
    reduced_norm,
    write_chain_file,
)
from .complexes import (
    Convention,
    HomologyResult,
    TruncatedComplex,
    build_truncated,
    conjugacy_split,
    connes_B,
    cyclic_descent_check,
    cyclic_tau,
    export_complex,
    hochschild_b,
    homogeneous_part,
    normalize_chain,
    project_to_cyclic_quotient,
    representative_chains,
    split_preservation_check,
    truncated_homology,
    tuple_conjugacy_class,
)
from .analysis import (
    Cochain,
    EtaParams,
    GrowthReport,
    area_cochain,
    bar_coboundary,
    boundedness_check,
    cochain_catalog,
    determinant_cochain,
    eta_seminorm,
    exp_length_cochain,
    growth_fit,
    homomorphism_cochain,
    indicator_cochain,
    length_power_cochain,
    load_cochain,
    normalize_cochain,
    product_cochain,
    sum_cochain,
    zero_cochain,
)
from .pairing import (
    BoundCertificate,
    CoverRadiusError,
    CyclicCocycle,
    NormalizationRequired,
    check_cyclicity,
    cyclic_symmetrize,
    extend_to_cyclic,
    fit_growth_constant,
    homogeneous_factoring_check,
    pair,
    support_violations,
    verify_cyclicity,
    verify_pairing_bound,
)

__version__ = "0.1.0"
