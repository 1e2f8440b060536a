"""Noncommutative finite-fold coverings and their Morita equivalence bimodules."""

__version__ = "0.1.0"

from .errors import (ActionRejected, ArgumentError, DimensionError, MembershipError,  # noqa: E402
                     NCMoritaError, PreconditionError, ValidationError)
from .linalg import Tolerance  # noqa: E402
from .groups import FiniteGroup, group_by_name, verify_group  # noqa: E402
from .algebra import AlgebraElement, StarAlgebra, verify_star_algebra  # noqa: E402
from .action import AlgebraAction, fixed_point_algebra, verify_action  # noqa: E402
from .hilbert import CoveringCandidate, certify_unital_covering, find_frame  # noqa: E402
from .crossed import CrossedElement, CrossedProduct  # noqa: E402
from .morita import EquivalenceCertificate, MoritaContext, certify_strong_morita  # noqa: E402

__all__ = [
    "ActionRejected", "ArgumentError", "DimensionError", "MembershipError", "NCMoritaError",
    "PreconditionError", "ValidationError", "Tolerance", "FiniteGroup", "group_by_name",
    "verify_group", "AlgebraElement", "StarAlgebra", "verify_star_algebra", "AlgebraAction",
    "fixed_point_algebra", "verify_action", "CoveringCandidate", "certify_unital_covering",
    "find_frame", "CrossedElement", "CrossedProduct", "EquivalenceCertificate", "MoritaContext",
    "certify_strong_morita", "__version__",
]
