"""Exact computations with modules over Artin local algebras over GF(p)."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    LocalAlgebra,
    RingSpec,
    build_algebra,
    classify,
    hilbert,
    invert_unit,
    load_ring,
    monomial_ci,
    tensor_algebra,
)
from .modules import (  # noqa: E402
    ActionModule,
    FreeMatrix,
    ModulePresentation,
    cokernel,
    cyclic_module,
    free_module,
    hom_space,
    is_isomorphic,
    minimalize,
    min_generators,
)
from .resolution import BettiTable, StageBudgetExceeded, resolve, tor_dims  # noqa: E402
from .series import poincare_of_k  # noqa: E402
