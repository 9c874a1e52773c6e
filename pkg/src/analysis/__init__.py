"""
Analysis pipeline: wavelet encoding, classifier-based feature selection,
statistical tests and mutual fingerprints.
"""
