"""
Core navigation stack: world, mapping, value map, scoring, planning, episodes
"""
