"""Linear and nonlinear free vibration of CNT-reinforced composite beams."""

__version__ = "0.1.0"
