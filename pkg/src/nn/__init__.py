"""
Numpy multilayer perceptrons, Gaussian policy head and Adam optimizer
"""
