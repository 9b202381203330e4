"""Analytic side: critical curves of the phase, the loop integral and its approximants."""

from .approx import (
    AT_T,
    AT_T1_MINUS,
    AT_T1_PLUS,
    DEFAULT_GATES,
    LAYERS,
    Approximation,
    Gates,
    LayerCurve,
    approximate,
    boundary_layer_approx,
    layer_curve,
    saddle_approx,
    saddle_condition,
    smallt_approx,
)
from .contour import (
    ContourResult,
    choose_method,
    contour_integral,
    estimate_cancellation_bits,
    hn_from_contour,
)
from .critical import (
    T_IS_T1,
    T_IS_T2,
    CriticalData,
    PhiEval,
    from_q,
    g_zeta,
    layer_constant_c,
    layer_constant_d,
    layer_constant_dhat,
    phi_eval,
    quartic_residual,
    t_of_zeta,
    thresholds,
    zeta,
)
from .gamma import log_gamma

__all__ = [name for name in dir() if not name.startswith("_")]
