"""Numerical phase-space analysis on the Heisenberg group.

Submodules:
    group  - group law, grid functions, Haar quadrature, vector fields
    fock   - truncated Fock/Hermite bases, representation matrices, ladders
    gft    - operator-valued group Fourier transform and its inverse
    weyl   - Weyl quantization, Moyal product, Mehler functional calculus
    hpdo   - pseudodifferential operators Op(a) and the symbol calculus
    lp     - Littlewood-Paley blocks, Besov norms, paraproducts
    cli    - check/suite/demo command line harness
"""

__version__ = "0.1.0"
