"""Statistics of topological excitations in finite excitation models."""

from .abelian import FiniteAbelianGroup, closure, coset_partition, product_group
from .complex import SimplicialComplex, builtin, from_maximal
from .expr import Expression, expand_theta, norm1, parse_process, restrict, translate
from .linalg import ResourceLimitError, SparseIntMatrix, snf, solve_integer
from .model import ExcitationModel, from_builtin, from_explicit, from_simplicial
from .statistics import (compute_Einv_basis, compute_T, compute_Tf, eliminate_operator, identity_generators,
                         impose, modified_order, order_of_expression)

__version__ = "0.1.0"
