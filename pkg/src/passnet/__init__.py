"""Directed pass-network analytics for football event streams.

Parses provider event files into typed streams, builds directed weighted
passmaps, splits them on key match events (half time, first goal, first
dismissal), and runs the analysis suite: centrality distributions, network
intensity, community structure, and directed graphlet/motif significance
profiling against configuration-model null ensembles.
"""

__version__ = "0.1.0"
