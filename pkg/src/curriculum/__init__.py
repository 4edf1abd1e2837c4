"""
Curriculum-based sensing reduction: importance ledger and reduction plan
"""
