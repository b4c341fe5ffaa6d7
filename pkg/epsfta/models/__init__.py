"""Fault-tree, probability-model and trace data types."""
