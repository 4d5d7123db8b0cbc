"""txtex-lab: resource-metered learning sessions with teachers and membership oracles."""

__version__ = "0.1.0"
