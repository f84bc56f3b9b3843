"""Certificates for coarse geometry on finite large-scale spaces."""

__version__ = "0.1.0"

from lsskit.family import (  # noqa: E402
    GroundSet,
    Scale,
    SetFamily,
    Subset,
    Verdict,
    horizon,
    iterated_star,
    multiplicity,
    refines,
    star,
    star_family,
    trivial_extension,
)
from lsskit.kernels import BACKEND  # noqa: E402
from lsskit.lss import InfMetric, LssSpace, build_lss, is_uniformly_bounded, metric_lss, subspace  # noqa: E402

__all__ = [
    "BACKEND",
    "GroundSet",
    "InfMetric",
    "LssSpace",
    "Scale",
    "SetFamily",
    "Subset",
    "Verdict",
    "build_lss",
    "horizon",
    "is_uniformly_bounded",
    "iterated_star",
    "metric_lss",
    "multiplicity",
    "refines",
    "star",
    "star_family",
    "subspace",
    "trivial_extension",
]
