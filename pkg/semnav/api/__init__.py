"""
API package for episode and batch management
"""
