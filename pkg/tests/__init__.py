"""Test module.

Contains the pytest cases (files beginning with "test"), test utils and benchmarks.
"""
