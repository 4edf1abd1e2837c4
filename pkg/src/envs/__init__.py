"""
Toy tactile in-hand rotation environments
"""
