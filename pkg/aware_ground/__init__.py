"""aware-ground: sensor-based cricket ground simulator and umpiring decision engine."""

__version__ = "0.1.0"
