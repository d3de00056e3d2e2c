"""Exact counting and search for rainbow k-AP-free colorings."""
