"""Identify lumpings and metastable states of Markov chains with the invariance matrix."""
