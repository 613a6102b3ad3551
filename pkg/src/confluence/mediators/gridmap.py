"""Value regridding between the grids two components expose.

Handles scalar-to-field broadcast, field-to-scalar collapse, and
field-to-field resampling on uniform rectilinear grids by bilinear
interpolation or nearest-node lookup.  Target nodes outside the
source hull are clamped to the source edge.
"""

import numpy as np

METHODS = ("bilinear", "nearest")


class GridMappingError(Exception):
    """The two grids cannot be mapped with the requested method."""


def _axis_fractions(dst_axis, src_axis, n_src):
    """Fractional source indices for one axis of target nodes."""
    dst_origin, dst_spacing, n_dst = dst_axis
    src_origin, src_spacing = src_axis
    x = dst_origin + dst_spacing * np.arange(n_dst)
    f = (x - src_origin) / src_spacing
    return np.clip(f, 0.0, n_src - 1)


def _axes(grid):
    rank = grid.rank
    return [
        (grid.origin[k], grid.spacing[k], grid.shape[k]) for k in range(rank)
    ]


def map_values(values, src, dst, method="bilinear"):
    """Resample ``values`` living on grid ``src`` onto grid ``dst``."""
    if method not in METHODS:
        raise GridMappingError(
            "unknown mapping method {!r}; pick one of {}".format(
                method, ", ".join(METHODS)
            )
        )
    values = np.asarray(values, dtype=float).ravel()
    if values.size != src.node_count:
        raise GridMappingError(
            "got {} values for a grid of {} nodes".format(values.size, src.node_count)
        )

    if src.kind == "scalar" and dst.kind == "scalar":
        return values.copy()
    if src.kind == "scalar":
        return np.full(dst.node_count, values[0])
    if dst.kind == "scalar":
        # collapse to the first node; good enough for point probes
        return np.array([values[0]])

    if src.rank != dst.rank:
        raise GridMappingError(
            "cannot map a rank-{} grid onto a rank-{} grid".format(src.rank, dst.rank)
        )

    src_axes = _axes(src)
    fractions = [
        _axis_fractions(
            (dst.origin[k], dst.spacing[k], dst.shape[k]),
            (src_axes[k][0], src_axes[k][1]),
            src.shape[k],
        )
        for k in range(src.rank)
    ]

    if method == "nearest":
        index = [
            np.clip(np.ceil(f - 0.5).astype(int), 0, n - 1)
            for f, n in zip(fractions, src.shape)
        ]
        field = values.reshape(src.shape)
        if src.rank == 1:
            return field[index[0]].copy()
        return field[np.ix_(index[0], index[1])].ravel()

    # bilinear: per-axis floor index and weight, then tensor product
    lows, weights = [], []
    for f, n in zip(fractions, src.shape):
        i0 = np.floor(f).astype(int)
        i0 = np.clip(i0, 0, max(n - 2, 0))
        lows.append(i0)
        weights.append(f - i0)

    field = values.reshape(src.shape)
    if src.rank == 1:
        i0, w = lows[0], weights[0]
        i1 = np.minimum(i0 + 1, src.shape[0] - 1)
        return (1.0 - w) * field[i0] + w * field[i1]

    i0, wi = lows[0], weights[0]
    j0, wj = lows[1], weights[1]
    i1 = np.minimum(i0 + 1, src.shape[0] - 1)
    j1 = np.minimum(j0 + 1, src.shape[1] - 1)
    wi = wi[:, None]
    wj = wj[None, :]
    out = (
        (1.0 - wi) * (1.0 - wj) * field[np.ix_(i0, j0)]
        + (1.0 - wi) * wj * field[np.ix_(i0, j1)]
        + wi * (1.0 - wj) * field[np.ix_(i1, j0)]
        + wi * wj * field[np.ix_(i1, j1)]
    )
    return out.ravel()
