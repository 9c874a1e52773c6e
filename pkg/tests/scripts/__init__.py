"""
Tests for scripts package

Contains tests for the variant-fingerprint command-line tool.
"""
