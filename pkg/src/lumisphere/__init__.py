"""Lighting-consistency analysis from imaged spheres.

Locates sphere boundaries with a robust EM circle fit, estimates
nine-coefficient spherical-harmonic lighting environments from the shaded
disks, re-renders spheres under the estimate, and scores lighting
consistency across image sets and within single images.
"""

from . import errors
from .analysis import (
    CrossSetReport,
    QuantileTriple,
    WithinImageReport,
    cross_set_report,
    pearson_r2,
    quantile_summary,
    within_image_report,
)
from .circlefit import (
    EdgeSet,
    EmParams,
    FitResult,
    e_step,
    fit_circle_em,
    fit_circle_em_edges,
    m_step,
    preprocess_edges,
    update_sigma,
)
from .fixtures import (
    FixtureScene,
    annotation_jitter,
    make_scene,
    random_environment,
    write_scene,
)
from .imageops import crop_resize, median_filter_3x3
from .lighting import (
    ChannelLighting,
    SampleSet,
    estimate_all_channels,
    estimate_channel,
    normalize_env,
    sample_sphere,
    solve_lighting,
)
from .pipeline import (
    Annotation,
    ImageRecord,
    emit_report,
    group_for_within,
    load_records,
    run_batch,
    run_image_pipeline,
    scan_workspace,
)
from .render import RenderResult, RenderSpec, render_sphere, shade_disk
from .shcore import (
    COEFF_NAMES,
    NORMALIZED_COEFF_NAMES,
    Circle,
    design_row,
    normal_from_pixel,
    radiance,
    sh_basis,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "COEFF_NAMES",
    "ChannelLighting",
    "Circle",
    "CrossSetReport",
    "EdgeSet",
    "EmParams",
    "FitResult",
    "FixtureScene",
    "ImageRecord",
    "NORMALIZED_COEFF_NAMES",
    "QuantileTriple",
    "RenderResult",
    "RenderSpec",
    "SampleSet",
    "WithinImageReport",
    "annotation_jitter",
    "cross_set_report",
    "crop_resize",
    "design_row",
    "e_step",
    "emit_report",
    "errors",
    "estimate_all_channels",
    "estimate_channel",
    "fit_circle_em",
    "fit_circle_em_edges",
    "group_for_within",
    "load_records",
    "m_step",
    "make_scene",
    "median_filter_3x3",
    "normal_from_pixel",
    "normalize_env",
    "pearson_r2",
    "preprocess_edges",
    "quantile_summary",
    "radiance",
    "random_environment",
    "render_sphere",
    "run_batch",
    "run_image_pipeline",
    "sample_sphere",
    "scan_workspace",
    "sh_basis",
    "shade_disk",
    "solve_lighting",
    "update_sigma",
    "within_image_report",
    "write_scene",
]
