# Hermitian/PSD checks on anchor matrices, relative to max(1, trace)
HERMITIAN_TOL = 1e-9

# a block whose trace is below this fraction of the total is treated as switched off
NEGLIGIBLE_BLOCK_FRACTION = 1e-5

# traces below this (watts) count as exactly zero
ZERO_TRACE_WATTS = 1e-12

# eigen extraction is used once λ_max/Tr reaches this ratio
RANK_ONE_TARGET = 0.99

RANDOMIZATION_COUNT = 200
