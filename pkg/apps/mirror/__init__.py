"""Mirror-side intersection forms and the squaring map."""

from .square import (
    FORM_PRESETS,
    IntersectionForm,
    betti_via_square,
    delta_criterion,
    load_form,
    load_intersection_form,
    square_matrix,
    square_report,
)

__all__ = [
    "FORM_PRESETS",
    "IntersectionForm",
    "betti_via_square",
    "delta_criterion",
    "load_form",
    "load_intersection_form",
    "square_matrix",
    "square_report",
]
