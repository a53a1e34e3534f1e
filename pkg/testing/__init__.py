"""Unit tests for the pressurelab package. Run with python -m unittest discover -s testing -t ."""
