"""
Core dickepulse functionality
"""
