"""Mixed-unitary channels over finite Weyl groups: majorization, output characteristics, verification."""
from .group import (
    CyclicOrders,
    DimensionLimitError,
    WeylLabel,
    clock_matrix,
    commutant_dimension,
    generators,
    shift_matrix,
    weyl_operator,
)
from .channel import (
    InvalidStateError,
    MixedUnitaryChannel,
    ProductChannel,
    compose_as_stages,
    conditional_expectation,
    tensor,
)
from .majorization import (
    channel_majorized_report,
    karamata_gap,
    majorization_condition,
    marginal,
    sort_desc,
    star,
    weak_majorize_leq,
)
from .functionals import (
    ConvexFunction,
    abs_shift,
    closed_form_profile,
    convex_trace,
    eigvals_desc,
    power,
    product_closed_form,
    xlogx,
)
from .optimize import (
    OptimizerConfig,
    additivity_report,
    gradient_check,
    maximize_lp,
    minimize_convex_trace,
)

__version__ = "0.1.0"
