from combigrad.lab.interpolation import (
    EQ_TOL,
    ContinuityReport,
    DisplacementReport,
    GradientReport,
    MonotoneReport,
    SandwichReport,
    bound_k,
    check_continuity,
    check_gradient,
    check_monotone_sets,
    check_sandwich,
    displacement_ratios,
    eval_f_lambda,
    evaluate_many,
    perturbed_argmin,
)
from combigrad.lab.landscape import CSV_HEADER, LandscapeGrid, render_landscape
from combigrad.lab.problems import (
    LabProblem,
    Linearization,
    eval_f,
    random_problem,
    toy_1d,
    toy_1d_closed_form,
    toy_three_region,
)

__all__ = [
    "CSV_HEADER",
    "EQ_TOL",
    "ContinuityReport",
    "DisplacementReport",
    "GradientReport",
    "LabProblem",
    "LandscapeGrid",
    "Linearization",
    "MonotoneReport",
    "SandwichReport",
    "bound_k",
    "check_continuity",
    "check_gradient",
    "check_monotone_sets",
    "check_sandwich",
    "displacement_ratios",
    "eval_f",
    "eval_f_lambda",
    "evaluate_many",
    "perturbed_argmin",
    "random_problem",
    "render_landscape",
    "toy_1d",
    "toy_1d_closed_form",
    "toy_three_region",
]
