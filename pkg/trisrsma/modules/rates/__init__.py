from .evaluator import (
    FEASIBILITY_TOL,
    Precoders,
    RateReport,
    common_sinr,
    gain_matrix,
    interference_at_pu,
    lifted_gain_matrix,
    lifted_noma_rate_report,
    lifted_rate_report,
    noma_rate_report,
    private_sinr,
    rate_report,
    sic_order,
    split_common_rate,
)

__all__ = [
    'FEASIBILITY_TOL', 'Precoders', 'RateReport',
    'common_sinr', 'private_sinr', 'interference_at_pu',
    'gain_matrix', 'lifted_gain_matrix',
    'rate_report', 'lifted_rate_report', 'noma_rate_report', 'lifted_noma_rate_report',
    'sic_order', 'split_common_rate',
]
