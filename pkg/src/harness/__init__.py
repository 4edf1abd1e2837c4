"""
Experiment driver: training loop, trial sets, evaluation protocols, reports and suites
"""
