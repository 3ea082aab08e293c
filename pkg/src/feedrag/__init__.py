"""Compounded loss to annual investment fees and the ``n * eps`` rule of thumb."""

from .accuracy import (
    ErrorGrid,
    RegionMask,
    analytic_boundary,
    analytic_error_estimate,
    classify_region,
    relative_error,
    sweep_error_grid,
)
from .dataio import (
    TrajectoryPoint,
    emit_grid_csv,
    emit_region_svg,
    emit_trajectory_csv,
    parse_returns_csv,
    run_trajectory,
)
from .loss import (
    LossReport,
    approx_loss_l1,
    approx_loss_l1_improved,
    approx_loss_l2,
    gain_approx,
    loss_report,
    true_loss_constant,
    true_loss_series,
)
from .model import (
    DomainError,
    FeeDragError,
    ParseError,
    ReturnSeries,
    compound_constant,
    compound_series,
)

__version__ = "0.1.0"
