"""Leftmost eigenpairs of sparse SPD matrices by DACG-Newton with BFGS-updated preconditioners."""
__version__ = "0.1.0"

from .bfgs import BfgsWindow, apply_preconditioner, spd_probe
from .dacg import DacgConfig, dacg_minimize
from .deflation import DeflationBasis, ProjectedJacobian, eigenresidual, orthogonalize
from .ichol import ICBreakdown, ICFactor, apply_p0, diagonal_factor, factor
from .jd import JdConfig, jd_solve
from .kernels import BACKEND
from .mmio import MatrixMarketError, load_matrix_market, write_matrix_market
from .newton import EigenPair, SolverConfig, run_comparison, solve_dacg_only, solve_leftmost
from .pcg import PcgConfig, solve_correction
from .sparse import SparseFormatError, SparseMatrix, generate_laplacian, matvec, rayleigh_quotient
from .trace import ConvergenceTrace

__all__ = [
    "BACKEND", "BfgsWindow", "ConvergenceTrace", "DacgConfig", "DeflationBasis", "EigenPair",
    "ICBreakdown", "ICFactor", "JdConfig", "MatrixMarketError", "PcgConfig",
    "ProjectedJacobian", "SolverConfig", "SparseFormatError", "SparseMatrix",
    "apply_p0", "apply_preconditioner", "dacg_minimize", "diagonal_factor", "eigenresidual",
    "factor", "generate_laplacian", "jd_solve", "load_matrix_market", "matvec",
    "orthogonalize", "rayleigh_quotient", "run_comparison", "solve_correction",
    "solve_dacg_only", "solve_leftmost", "spd_probe", "write_matrix_market",
]
