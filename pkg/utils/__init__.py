"""
Utility Functions Package for qpack
"""
