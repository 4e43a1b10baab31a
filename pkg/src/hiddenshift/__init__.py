"""Classical toolkit for the generalized hidden shift algorithm.

Matrix sum solving (lattice construction, exact LLL, fixed-dimension integer
programming, bisection), dense simulation of the states and the pretty good
measurement, and eta-distribution statistics.
"""

from .intprog import Box, IpProblem, build_ip, enumerate_box_solutions, feasible
from .lattice import check_reduced, gram_schmidt, lll_reduce
from .msp import (
    CapExceeded,
    InvalidInstance,
    MspInstance,
    SolutionLattice,
    SolutionSet,
    brute_solutions,
    eta,
    gcd_solution_count,
    homogeneous_basis,
    make_instance,
    particular_solution,
    solution_lattice,
)

__version__ = "0.1.0"
