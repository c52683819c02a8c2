"""Orders-of-coupling HDMR neural network whose neurons are additive-GPR
component functions."""

from ._core import (
    Dataset,
    FeatureMap,
    HdmrError,
    InvalidArgument,
    InvalidOrder,
    IoError,
    Model,
    NumericError,
    ParseError,
    ShapeError,
    build_feature_map,
    components,
    enumerate_subsets,
    fit,
    grid_search_l,
    importance,
    load_csv,
    load_model,
    pearson_corr,
    rmse,
    save_model,
    sobol_points,
    split,
    sweep,
    synth,
    write_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
