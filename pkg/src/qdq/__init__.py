"""Path-integral dynamics of dipole-coupled quantum-dot excitons in a phonon bath."""

__version__ = "0.1.0"

# bumped whenever the CSV/JSON layouts change
FORMAT_VERSION = 1
