"""
Core Components Package for qpack
"""
