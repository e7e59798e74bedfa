"""Sparsifiability classification, sampling sparsifiers and exhaustive checks for CSPs."""
