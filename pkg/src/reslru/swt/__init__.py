from .capacitive import (
    Detunings,
    dressed_drive_terms,
    dressed_static_1st,
    g_tilde_lowest_order,
    s1_capacitive,
)
from .driven import (
    SWTGenerators,
    double_dressed_static,
    effective_coupling,
    residual_coupling,
    second_swt_generators,
)
from .generic import block_diagonal_series, solve_generator, swt_generators
from .report import (
    EffectiveCouplingReport,
    comparison_table,
    eta,
    solve_omega_d_star_analytic,
)

__all__ = [
    "Detunings",
    "EffectiveCouplingReport",
    "SWTGenerators",
    "block_diagonal_series",
    "comparison_table",
    "double_dressed_static",
    "dressed_drive_terms",
    "dressed_static_1st",
    "effective_coupling",
    "eta",
    "g_tilde_lowest_order",
    "residual_coupling",
    "s1_capacitive",
    "second_swt_generators",
    "solve_generator",
    "solve_omega_d_star_analytic",
    "swt_generators",
]
