"""
Synthetic crop-field data generation, detection box fusion and two-step
diagnosis simulation
"""

__version__ = "0.1.0"
