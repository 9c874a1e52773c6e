"""
Tests for the process variant fingerprint toolkit.

This package contains unit and integration tests covering:
- Event log parsing and variant splitting
- Haar wavelet encoding and design matrices
- Classifier training, cross-validation and scoring
- Statistical tests, feature selection and fingerprints
- The command-line pipeline
"""

__version__ = "1.0.0"
