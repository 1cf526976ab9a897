"""
API models package
"""
