"""
Scripts package for the process variant fingerprint CLI tools.
"""
