"""oreforge: exact computations in iterated Ore and skew Laurent towers."""

__version__ = "0.1.0"
