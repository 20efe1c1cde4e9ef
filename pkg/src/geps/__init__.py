"""Euler-Poincare-Suslov dynamics on SE(2), its central extensions and the
hydrodynamic Chaplygin sleigh."""
from .algebra import (GroupElement, StructureAlgebra, bracket_se2, coadjoint_se2, group_exp,
                      group_inv, group_mul, pairing, se2_algebra, trace_ad)
from .eps import (ConstraintSet, EPSSystem, MeasureVerdict, eps_rhs_base, eps_rhs_ext,
                  measure_criterion, measure_criterion_extended)
from .integrate import IntegratorConfig, Trajectory, drift_report, integrate, reconstruct
from .models import (CirculationParams, HeisenbergParams, InertiaTensor, SleighParams,
                     classify_equilibrium, equilibria_line, separatrix_energy, sleigh_reduced_rhs)
from .poisson import PoissonStructure, TestFunction, ham_vf, jacobi_residual, lp_general

__version__ = "0.1.0"

__all__ = [
    "GroupElement", "StructureAlgebra", "bracket_se2", "coadjoint_se2", "group_exp", "group_inv",
    "group_mul", "pairing", "se2_algebra", "trace_ad",
    "ConstraintSet", "EPSSystem", "MeasureVerdict", "eps_rhs_base", "eps_rhs_ext",
    "measure_criterion", "measure_criterion_extended",
    "IntegratorConfig", "Trajectory", "drift_report", "integrate", "reconstruct",
    "CirculationParams", "HeisenbergParams", "InertiaTensor", "SleighParams",
    "classify_equilibrium", "equilibria_line", "separatrix_energy", "sleigh_reduced_rhs",
    "PoissonStructure", "TestFunction", "ham_vf", "jacobi_residual", "lp_general",
]
