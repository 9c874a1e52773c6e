"""
Tests for the synthetic log generator.
"""
