"""Shape-margin quantification and knowledge-augmented loss evaluation for nodule masks."""

from .errors import (
    CenterNotInterior,
    CenterOutsideMask,
    DegenerateHull,
    DegeneratePolygon,
    DimensionMismatch,
    EmptyBatch,
    EmptyMask,
    InvalidScale,
    MalformedFile,
    MalformedPointList,
    MalformedXML,
    NoduleKitError,
    NonPositiveAR,
    UnknownLabelWarning,
    ZeroRadii,
)
from .geometry import RadialProfile, convex_hull, radial_profile, ray_contour_distance, ray_hull_distance
from .ingest import (
    CANONICAL_SIDE,
    AnnotationRecord,
    parse_annotation_xml,
    rasterize_polygon,
    resize_to_canonical,
    serialize_annotation_xml,
)
from .knowledge_loss import (
    INITIAL_WEIGHTS,
    SWITCHED_WEIGHTS,
    LossWeights,
    Phase,
    SampleRecord,
    ScheduleState,
    ar_penalties,
    classification_loss,
    constraint_penalty,
    constraint_penalty_from_masks,
    overall_loss,
    segmentation_loss,
    update_schedule,
)
from .mask import (
    BinaryMask,
    PlanarPoint,
    Polygon,
    centroid,
    largest_component,
    load_mask,
    scaled_extent,
    trace_contour,
    write_mask,
)
from .metrics import (
    ClassificationMetrics,
    ConfusionCounts,
    OverlapScores,
    classification_metrics,
    confusion,
    iou_dice,
)
from .mixture import (
    DEFAULT_EMBED_DIM,
    DEFAULT_PATCH_SIZE,
    EmbeddingSet,
    FeatureGrid,
    MixParams,
    attention_map,
    bilinear_upsample,
    excite,
    exp_mix,
    exponential_mixture,
    squeeze,
)
from .shape_margin import DEFAULT_RADIAL_COUNT, ShapeMarginReport, aspect_ratio, assess, bcsi, irregularity

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "BinaryMask",
    "CANONICAL_SIDE",
    "CenterNotInterior",
    "CenterOutsideMask",
    "ClassificationMetrics",
    "ConfusionCounts",
    "DEFAULT_EMBED_DIM",
    "DEFAULT_PATCH_SIZE",
    "DEFAULT_RADIAL_COUNT",
    "DegenerateHull",
    "DegeneratePolygon",
    "DimensionMismatch",
    "EmbeddingSet",
    "EmptyBatch",
    "EmptyMask",
    "FeatureGrid",
    "INITIAL_WEIGHTS",
    "InvalidScale",
    "LossWeights",
    "MalformedFile",
    "MalformedPointList",
    "MalformedXML",
    "MixParams",
    "NoduleKitError",
    "NonPositiveAR",
    "OverlapScores",
    "Phase",
    "PlanarPoint",
    "Polygon",
    "RadialProfile",
    "SWITCHED_WEIGHTS",
    "SampleRecord",
    "ScheduleState",
    "ShapeMarginReport",
    "UnknownLabelWarning",
    "ZeroRadii",
    "ar_penalties",
    "aspect_ratio",
    "assess",
    "attention_map",
    "bcsi",
    "bilinear_upsample",
    "centroid",
    "classification_loss",
    "classification_metrics",
    "confusion",
    "constraint_penalty",
    "constraint_penalty_from_masks",
    "convex_hull",
    "excite",
    "exp_mix",
    "exponential_mixture",
    "iou_dice",
    "irregularity",
    "largest_component",
    "load_mask",
    "overall_loss",
    "parse_annotation_xml",
    "radial_profile",
    "rasterize_polygon",
    "ray_contour_distance",
    "ray_hull_distance",
    "resize_to_canonical",
    "scaled_extent",
    "segmentation_loss",
    "serialize_annotation_xml",
    "squeeze",
    "trace_contour",
    "update_schedule",
    "write_mask",
    "__version__",
]
