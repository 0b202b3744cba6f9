class BenchmarkConfig:
    """Benchmark scheme configuration"""

    # Power-only schemes scan this many total-power levels
    POWER_GRID_POINTS = 200
    POWER_GRID_FLOOR = 1e-4  # fraction of the transmit budget

    # Scheme names accepted on the command line
    DEFAULT_SCHEMES = ["proposed", "sdma", "noma", "no_ris"]
