"""
Tests for event log parsing and variant splitting.
"""
