"""Energy-aware flight and NOMA power control for a solar HAPS."""

__version__ = "0.1.0"
