"""
Qubit Marginals - polygon inequalities toolkit
Feasibility, synthesis and verification of one-qubit reduced states of pure n-qubit states.
"""

__version__ = "1.0.0"
