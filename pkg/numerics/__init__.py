from .contours import (
    Contour, ContourKind, PoleSpec, make_circle, make_origin_circle, make_pole_contour, make_pair,
    make_airy, make_vertical, integrate, integrate2, integrate2_separable, check_separation, refine_until,
)
from .pfaffian import (
    QuadratureGrid, make_grid, make_graded_grid, make_discrete_grid, pf, pfaffian_dense, fredholm_pf,
    fredholm_pf_discrete, fredholm_det_block, bracket_pf, resolvent_inner, fredholm_det, bracket_det,
)

__all__ = [
    'Contour', 'ContourKind', 'PoleSpec', 'make_circle', 'make_origin_circle', 'make_pole_contour',
    'make_pair', 'make_airy', 'make_vertical', 'integrate', 'integrate2', 'integrate2_separable',
    'check_separation', 'refine_until',
    'QuadratureGrid', 'make_grid', 'make_graded_grid', 'make_discrete_grid', 'pf', 'pfaffian_dense',
    'fredholm_pf', 'fredholm_pf_discrete', 'fredholm_det_block', 'bracket_pf', 'resolvent_inner',
    'fredholm_det', 'bracket_det',
]
