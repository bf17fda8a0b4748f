"""Joint graph embedding matcher for disparate image pairs."""

from ._core import (
    DeltaNorm,
    DistanceVariant,
    FeatureGrid,
    JgmatchError,
    RefineStatus,
    RunConfig,
    decode_feature_grid,
    delta_match_rate,
    describe_image,
    eig_topm,
    encode_feature_grid,
    estimate_homography_dlt,
    joint_affinity,
    load_feature_grid,
    load_image,
    mae,
    match_grids,
    pointwise_loss,
    project_points,
    refine_homography,
    save_feature_grid,
)

__all__ = [
    "DeltaNorm",
    "DistanceVariant",
    "FeatureGrid",
    "JgmatchError",
    "RefineStatus",
    "RunConfig",
    "decode_feature_grid",
    "delta_match_rate",
    "describe_image",
    "eig_topm",
    "encode_feature_grid",
    "estimate_homography_dlt",
    "joint_affinity",
    "load_feature_grid",
    "load_image",
    "mae",
    "match_grids",
    "pointwise_loss",
    "project_points",
    "refine_homography",
    "save_feature_grid",
]
