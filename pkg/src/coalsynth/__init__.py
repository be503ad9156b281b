"""Leader strategies with dynamic two-player coalitions in concurrent games
where every player ranks scLTL goals by a partial preference."""

__version__ = "0.1.0"
