"""External and interaction potentials on the periodic position grid.

Potentials are finite sums of two primitive term kinds:

* ``gauss`` terms  a * exp(-((x - c) / w)^2),
* ``cos`` terms    a * cos(pi * m * x / L + phi)  with integer harmonic m,

both smooth and compatible with the periodic grid (Gaussian tails are taken
narrow enough to vanish at the box edge; cosine harmonics are exactly
periodic).  A spec holds one such sum for the external potential and one for
the pair interaction kernel.  Text round trip through ``parse_terms`` /
``format_terms`` supports the config file format: terms joined by '+', each
as ``kind:val,val,...``, or the word ``none``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import SpaceGrid
from .spectral import periodic_convolution

__all__ = [
    "PotentialTerm",
    "PotentialSpec",
    "parse_terms",
    "format_terms",
]


@dataclass(frozen=True)
class PotentialTerm:
    kind: str
    amplitude: float
    # gauss: center and width; cos: harmonic index and phase
    p1: float = 0.0
    p2: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gauss", "cos"):
            raise ValueError(f"unknown potential term kind {self.kind!r}")
        if self.kind == "gauss" and self.p2 <= 0:
            raise ValueError("gaussian width must be positive")
        if self.kind == "cos" and self.p1 != int(self.p1):
            raise ValueError("cosine harmonic index must be an integer")

    def sample(self, x: SpaceGrid) -> np.ndarray:
        u = x.nodes
        if self.kind == "gauss":
            return self.amplitude * np.exp(-(((u - self.p1) / self.p2) ** 2))
        m = int(self.p1)
        return self.amplitude * np.cos(np.pi * m * u / x.half_width + self.p2)


def parse_terms(text: str) -> tuple:
    text = text.strip()
    if not text or text.lower() == "none":
        return ()
    terms = []
    for chunk in text.split("+"):
        chunk = chunk.strip()
        kind, _, rest = chunk.partition(":")
        vals = [float(v) for v in rest.split(",")] if rest else []
        if len(vals) < 1 or len(vals) > 3:
            raise ValueError(f"potential term needs 1..3 numbers: {chunk!r}")
        while len(vals) < 3:
            vals.append({1: 0.0, 2: 1.0}[len(vals)])
        terms.append(PotentialTerm(kind.strip(), *vals))
    return tuple(terms)


def format_terms(terms) -> str:
    if not terms:
        return "none"
    return " + ".join(f"{t.kind}:{t.amplitude:g},{t.p1:g},{t.p2:g}" for t in terms)


@dataclass(frozen=True)
class PotentialSpec:
    """External potential terms plus interaction kernel terms."""

    external: tuple = ()
    interaction: tuple = ()

    @property
    def has_interaction(self) -> bool:
        return bool(self.interaction)

    def sample_external(self, x: SpaceGrid) -> np.ndarray:
        out = np.zeros(x.npts)
        for t in self.external:
            out += t.sample(x)
        return out

    def sample_interaction(self, x: SpaceGrid) -> np.ndarray:
        out = np.zeros(x.npts)
        for t in self.interaction:
            out += t.sample(x)
        return out

    def mean_field(self, x: SpaceGrid, density: np.ndarray) -> np.ndarray:
        """V(x) + (W * density)(x) for a position density sampled on x."""
        out = self.sample_external(x)
        if self.has_interaction:
            out = out + periodic_convolution(self.sample_interaction(x), density, x.dx)
        return out

    @classmethod
    def from_strings(cls, external: str, interaction: str) -> "PotentialSpec":
        return cls(parse_terms(external), parse_terms(interaction))
