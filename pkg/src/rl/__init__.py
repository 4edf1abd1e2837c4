"""
Asymmetric actor-critic policy-gradient trainer
"""
