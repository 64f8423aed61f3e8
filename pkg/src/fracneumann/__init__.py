"""Galerkin discretization of -alpha Lap + int (-Lap)^s dmu(s) on an interval
with nonlocal Neumann conditions, plus numerical checks of its structure."""
from .assembly import (AssembledSystem, assemble, assemble_load, energy,
                       gagliardo_seminorm_sq, omega_form, raw_fractional_forms)
from .elliptic import SolveReport, check_compatibility, schur_interior_operator, solve
from .errors import (CompatibilityError, ConfigError, FinitenessError, MeasureError,
                     MeshError, SingularityError, TailError)
from .extension import ExtensionProbe, continuity_probe, extend, minimality_check
from .heat import HeatTrace, evolve, step
from .kernel import (KernelContext, c_ns, extension_ratio, neumann_residual,
                     w_s_omega)
from .measure import (SpectralMeasure, from_atoms, from_density, from_series,
                      parse_measure, s_sharp, zero_measure)
from .mesh import DomainMesh, build_mesh
from .perimeter import PerimeterReport, per_s_interval, superposed_perimeter
from .spectral import EigenDecomposition, eigenpairs, poincare_constant

__all__ = [
    "assemble", "assemble_load", "AssembledSystem", "build_mesh", "c_ns",
    "check_compatibility", "CompatibilityError", "ConfigError", "continuity_probe",
    "DomainMesh", "EigenDecomposition", "eigenpairs", "energy", "evolve", "extend",
    "extension_ratio", "ExtensionProbe", "FinitenessError", "from_atoms", "from_density",
    "from_series", "gagliardo_seminorm_sq", "HeatTrace", "KernelContext", "MeasureError",
    "MeshError", "minimality_check", "neumann_residual", "omega_form", "parse_measure",
    "per_s_interval", "PerimeterReport", "poincare_constant", "raw_fractional_forms",
    "s_sharp", "schur_interior_operator", "SingularityError", "solve", "SolveReport",
    "SpectralMeasure", "step", "superposed_perimeter", "TailError", "w_s_omega",
    "zero_measure",
]

__version__ = "0.1.0"
