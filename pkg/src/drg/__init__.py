"""
Deep random generator: masked-slot replacement plus a per-epoch random layer
"""
