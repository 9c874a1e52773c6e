"""
Tests for logging and artifact serialization helpers.
"""
