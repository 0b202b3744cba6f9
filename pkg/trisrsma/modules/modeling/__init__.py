from .builder import (
    AccessScheme,
    BoundedTerm,
    RateTerm,
    SubproblemLayout,
    build_subproblem,
    check_qos_reachable,
    model_objective,
    model_point,
    rate_terms,
)
from .embedding import (
    AffineForm,
    complex_from_embedding,
    embedding_operator,
    hermitian_embed,
    pack_hermitian,
    principal_component,
    psd_clamp,
    rank_one_ratio,
    trace_coefficients,
    unpack_hermitian,
)
from .recovery import (
    Recovery,
    block_rank_ratio,
    evaluate_precoders,
    fit_to_limits,
    recover_from_blocks,
    recover_precoders,
)
from .state import ScaState, linearize_log_term, linearize_vk, log_term

__all__ = [
    'AccessScheme', 'BoundedTerm', 'RateTerm', 'SubproblemLayout', 'build_subproblem', 'check_qos_reachable',
    'model_objective', 'model_point', 'rate_terms',
    'AffineForm', 'complex_from_embedding', 'embedding_operator', 'hermitian_embed', 'pack_hermitian',
    'principal_component', 'psd_clamp', 'rank_one_ratio', 'trace_coefficients', 'unpack_hermitian',
    'Recovery', 'block_rank_ratio', 'evaluate_precoders', 'fit_to_limits', 'recover_from_blocks',
    'recover_precoders',
    'ScaState', 'linearize_log_term', 'linearize_vk', 'log_term',
]
