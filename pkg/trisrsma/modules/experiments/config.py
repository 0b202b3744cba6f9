class SweepConfig:
    """Experiment sweep configuration"""

    DEFAULT_REALIZATIONS = 20

    # Grids per study
    ELEMENT_GRID = [4, 9, 16, 25, 36]
    POWER_GRID_DBW = [4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0]

    # Study settings: SE-floor fraction, plus the fixed parameter of each study
    ELEMENTS_ETA0_FRACTION = 0.9
    ELEMENTS_P_MAX_DBW = 10.0
    POWER_ETA0_FRACTION = 0.5
    PARETO_ETA0_FRACTION = 0.4
    FIXED_ELEMENTS = 9

    # Output format
    CSV_HEADER = [
        "sweep_value", "scheme", "realization", "se_bps_hz", "ee_bps_per_watt",
        "feasible", "rank_ratio", "iters", "wall_ms",
    ]
    FLOAT_FORMAT = ".9g"

    # Every VERIFY_STRIDE-th row is re-evaluated from its stored precoders
    VERIFY_STRIDE = 20
    VERIFY_TOL = 1e-9

    # Process exit codes
    EXIT_OK = 0
    EXIT_ERROR = 1
    EXIT_FLAGGED = 2
