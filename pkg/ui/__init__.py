"""
User Interface Package for qpack
"""
