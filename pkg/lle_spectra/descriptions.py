# File: lle_spectra/descriptions.py

from dataclasses import dataclass

from .const import (
    SAMPLER_CIRCLE,
    SAMPLER_FLAT_TORUS,
    SAMPLER_SHEPP_LOGAN,
    SAMPLER_SPHERE,
    SAMPLER_TORUS,
)


@dataclass(frozen=True)
class SamplerDescription:
    key: str
    name: str
    intrinsic_dim: int
    min_n: int
    options: tuple[str, ...] = ()


# Map of sampler descriptions
SAMPLER_DESCRIPTIONS: tuple[SamplerDescription, ...] = (
    SamplerDescription(
        key=SAMPLER_CIRCLE,
        name="Unit circle",
        intrinsic_dim=1,
        min_n=3,
        options=("mode", "seed"),
    ),
    SamplerDescription(
        key=SAMPLER_SPHERE,
        name="2-sphere",
        intrinsic_dim=2,
        min_n=4,
        options=("radius", "mode", "seed"),
    ),
    SamplerDescription(
        key=SAMPLER_TORUS,
        name="Torus, tube radius 1/2",
        intrinsic_dim=2,
        min_n=4,
        options=("seed",),
    ),
    SamplerDescription(
        key=SAMPLER_FLAT_TORUS,
        name="Flat 1-torus grid",
        intrinsic_dim=1,
        min_n=3,
    ),
    SamplerDescription(
        key=SAMPLER_SHEPP_LOGAN,
        name="Shepp-Logan projections at equispaced angles",
        intrinsic_dim=1,
        min_n=8,
        options=("p",),
    ),
)

DESCRIPTIONS_BY_KEY = {desc.key: desc for desc in SAMPLER_DESCRIPTIONS}
