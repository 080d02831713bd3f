"""Solvers for linear ODEs with variable coefficients.

Modules
-------
expr         expression parsing, evaluation and differentiation
linalg       small dense matrix kernels (expm, eigen-decompositions)
polymat      polynomial matrices and the derivative-plus-matrix operator
matform      scalar ODE to companion system reduction
exact        exactly solvable matrix classes
oracle       adaptive Dormand-Prince reference integrator
quadrature   cumulative Simpson quadrature on piecewise-uniform grids
spectral     biorthogonal first-order approximation, correction and WKB
eigenproblem boundary-value eigenvalues by characteristic roots and shooting
quantum      Trotter propagation and adiabatic approximations
cli          the ``varode`` command
"""

__version__ = "0.1.0"
