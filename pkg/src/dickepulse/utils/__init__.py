"""
Utility functions for dickepulse
"""
