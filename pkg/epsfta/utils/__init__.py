"""Analysis, sizing, simulation and reporting functions."""
