"""
Tests for encoding, classification, statistics, selection and fingerprints.
"""
