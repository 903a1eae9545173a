"""Slow reproductions of the full classifications and oracle sweeps."""
