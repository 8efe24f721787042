"""Ground states and phase-diagram scans of the spin-1/2 alternating Heisenberg chain in a field."""

__version__ = "0.1.0"
