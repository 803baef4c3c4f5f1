"""Linearized Boltzmann operator for polyatomic gases with a continuous
internal energy variable: collision kinematics, kernels, the nonlinear
collision operator, the decomposition L = nu - K and its Nystrom spectrum."""

from .kinematics import BLParams, CollisionPair, GasModel, PhasePoint, post_collision, total_energy
from .models import ScatteringModel, kernel_B, sigma
from .quadrature import QuadratureSpec, Rule
from .distributions import Field, MaxwellianParams, maxwellian_field
from .linearized import C0, KernelArgs, k1_eval, k2_eval, k_eval, nu_general, nu_reduced_e1, weak_L_mc
from .spectral import Grid, NystromOperator, assemble, make_grid, symmetrized_L

__version__ = "0.1.0"

__all__ = [
    "BLParams", "CollisionPair", "GasModel", "PhasePoint", "post_collision", "total_energy",
    "ScatteringModel", "kernel_B", "sigma", "QuadratureSpec", "Rule",
    "Field", "MaxwellianParams", "maxwellian_field",
    "C0", "KernelArgs", "k1_eval", "k2_eval", "k_eval", "nu_general", "nu_reduced_e1", "weak_L_mc",
    "Grid", "NystromOperator", "assemble", "make_grid", "symmetrized_L",
]
