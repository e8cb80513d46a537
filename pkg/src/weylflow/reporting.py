"""Result serialization: metric rows as CSV, field rasters as flat binary.

CSV schema is fixed: header ``experiment,h,t,metric,value``, floats printed
with repr-faithful %.17g, rows sorted before writing so re-emission is
deterministic.  Metric names must come from the registry below so that
downstream tooling never has to guess.

Rasters use a little-endian binary layout: magic ``MSF1``, uint32 M and
M_xi, float64 L, L_xi, h, one complexity byte (0 real, 1 complex), then the
row-major float64 samples (re/im interleaved when complex).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grids import PhaseGrid, SpaceGrid, SymbolField

__all__ = ["METRICS", "ResultTable", "write_field_raster", "read_field_raster"]

METRICS = frozenset({
    # coherent states and quantization identities
    "overlap_max_abs_err", "resolution_identity_err",
    "trace_formula_relerr", "product_trace_relerr", "roundtrip_err",
    "projector_symbol_err",
    "antiwick_bridge_err", "antiwick_min_eig", "antiwick_trace_relerr",
    "wick_table_err", "pairing_identity_err",
    "smoothed_overlap_ratio", "trace_bracket_ratio",
    # seminorm and budget monitors
    "seminorm_value", "seminorm_cross_h_ratio",
    "trace_budget_ratio", "operator_budget_ratio",
    "remainder_sup_ratio", "remainder_opnorm_ratio",
    # bracket expansion
    "c2_sup", "bracket_center_err",
    "moyal_l1_n1_slope", "moyal_sup_n1_slope",
    "moyal_l1_n2_slope", "moyal_sup_n2_slope",
    # propagation monitors
    "trace_drift", "eig_floor", "herm_drift", "symbol_l1",
    "mass_drift", "min_value", "free_transport_err", "jacobian_err",
    "pullback_consistency",
    # convergence studies
    "l1_error", "l1_slope", "trace_norm_error", "trace_norm_slope",
    "refinement_shift",
    "u1_sup", "u3_sup", "init_error", "egorov_l1", "egorov_slope",
})


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)

    def append(self, experiment: str, h: float, t: float, metric: str,
               value: float) -> None:
        if metric not in METRICS:
            raise ValueError(f"metric {metric!r} is not in the registry")
        self.rows.append((str(experiment), float(h), float(t), metric,
                          float(value)))

    def extend(self, other: "ResultTable") -> None:
        self.rows.extend(other.rows)

    def sorted_rows(self) -> list:
        return sorted(self.rows)

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = ["experiment,h,t,metric,value"]
        for exp, h, t, metric, value in self.sorted_rows():
            lines.append(f"{exp},{h:.17g},{t:.17g},{metric},{value:.17g}")
        path.write_text("\n".join(lines) + "\n")
        return path


_HEADER = struct.Struct("<4sII3dB")


def write_field_raster(path, fld: SymbolField, h: float) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    vals = np.asarray(fld.values)
    is_complex = np.iscomplexobj(vals)
    head = _HEADER.pack(b"MSF1", fld.grid.x.npts, fld.grid.xi.npts,
                        fld.grid.x.half_width, fld.grid.xi.half_width,
                        float(h), 1 if is_complex else 0)
    if is_complex:
        body = np.empty(vals.shape + (2,))
        body[..., 0] = vals.real
        body[..., 1] = vals.imag
    else:
        body = vals.astype(float)
    with open(path, "wb") as f:
        f.write(head)
        f.write(np.ascontiguousarray(body, dtype="<f8").tobytes())
    return path


def read_field_raster(path) -> tuple:
    """Returns (SymbolField, h)."""
    raw = Path(path).read_bytes()
    magic, m, m_xi, half, half_xi, h, flag = _HEADER.unpack_from(raw)
    if magic != b"MSF1":
        raise ValueError(f"{path}: not a field raster (bad magic {magic!r})")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    grid = PhaseGrid(SpaceGrid(half, m), SpaceGrid(half_xi, m_xi))
    if flag:
        body = body.reshape(m, m_xi, 2)
        vals = body[..., 0] + 1j * body[..., 1]
    else:
        vals = body.reshape(m, m_xi)
    return SymbolField(grid, vals.copy()), h
