"""
Configuration Package for qpack
"""
