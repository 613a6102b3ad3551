"""Adapters that sit between coupled components: units, grids, time, files."""

from .gridmap import GridMappingError, map_values
from .interp import NoDataError, TimeInterpolator
from .units import (
    IncompatibleUnitsError,
    UnitError,
    UnknownUnitError,
    UnsupportedUnitsError,
    compatible_units,
    conversion,
    convert,
    parse_units,
)
from .writers import (
    TimeseriesWriter,
    read_grid_snapshot,
    read_timeseries,
    write_grid_snapshot,
)
