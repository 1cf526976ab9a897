"""
Exporters and visualizers for episode outputs
"""
