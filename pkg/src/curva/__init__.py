"""curva: exact analytic invariants and normal forms of plane-curve
multigerms over the Gaussian rationals.

High-level entry points:

* ``curva.curve``       - branches, multigerms, the group action, block forms
* ``curva.invariants``  - value semirings, differential value sets, fibers,
  conductors, determinacy bounds
* ``curva.normalform``  - unipotent and homothety normal forms, the analytic
  equivalence decision
* ``curva.moduli``      - closed-form oracles, generic sampling, moduli
  dimensions
* ``curva.cli``         - the ``curva`` command line
"""

from .curve import (
    Branch,
    BlockStructure,
    GroupElement,
    Multigerm,
    apply_group,
    make_branch,
    multigerm,
    puiseux_block_form,
    subgroup_for,
    tangent_slope,
    to_block_form,
)
from .errors import (
    CurvaError,
    DegreeInstabilityError,
    GuardError,
    PrecisionError,
    ValidationError,
)
from .invariants import (
    classify_maximal,
    determinacy_bounds,
    determinacy_bounds_definitional,
    fiber_nonempty,
    implicitize,
    intersection_mult,
    jacobian_value_set,
    kappa,
    valuation,
    value_membership,
    value_set,
)
from .normalform import (
    a_normal_form,
    compute_Lk,
    equivalent,
    full_normal_form,
    g_normal_form,
    homothety_compatible,
    jet_subspace,
)
from .moduli import ClassSpec, e_profile, moduli_dimension, sample_generic

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "BlockStructure",
    "GroupElement",
    "Multigerm",
    "apply_group",
    "make_branch",
    "multigerm",
    "puiseux_block_form",
    "subgroup_for",
    "tangent_slope",
    "to_block_form",
    "CurvaError",
    "DegreeInstabilityError",
    "GuardError",
    "PrecisionError",
    "ValidationError",
    "classify_maximal",
    "determinacy_bounds",
    "determinacy_bounds_definitional",
    "fiber_nonempty",
    "implicitize",
    "intersection_mult",
    "jacobian_value_set",
    "kappa",
    "valuation",
    "value_membership",
    "value_set",
    "a_normal_form",
    "compute_Lk",
    "equivalent",
    "full_normal_form",
    "g_normal_form",
    "homothety_compatible",
    "jet_subspace",
    "ClassSpec",
    "e_profile",
    "moduli_dimension",
    "sample_generic",
    "__version__",
]
