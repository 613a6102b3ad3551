"""Two-dimensional heat diffusion on a uniform rectilinear plate."""

import numpy as np

from ..component import Component, InitializationError


class HeatDiffusion2D(Component):
    """Explicit forward-time centered-space diffusion of temperature.

    The plate is a rank-2 uniform grid.  Temperature diffuses with
    constant diffusivity; the rim is either held at a boundary value
    fed through a scalar port (dirichlet) or closed off so no heat
    crosses it (insulated).
    """

    _COMPONENT_NAME = "heat2d"

    FIELD = "plate_surface__temperature"
    BOUNDARY = "plate_surface_boundary__temperature"

    def _configure(self, config):
        nx = self._config_value(config, "nx", default=8, kind=int)
        ny = self._config_value(config, "ny", default=8, kind=int)
        dx = self._config_value(config, "dx", default=1.0)
        dy = self._config_value(config, "dy", default=1.0)
        if "shape" in config:
            ny, nx = (int(n) for n in config["shape"])
        if "spacing" in config:
            dy, dx = (float(d) for d in config["spacing"])
        if nx < 3 or ny < 3:
            raise InitializationError(
                "plate needs at least 3 nodes per direction, got {}x{}".format(ny, nx)
            )
        if dx <= 0 or dy <= 0:
            raise InitializationError("grid spacing must be positive")

        self._alpha = self._config_value(config, "alpha", default=1.0)
        if self._alpha <= 0:
            raise InitializationError("alpha must be positive")
        step = self._config_value(config, "time_step", default=0.1)
        # explicit stencil blows up past this limit
        limit = dx * dx * dy * dy / (2.0 * self._alpha * (dx * dx + dy * dy))
        if step > limit:
            raise InitializationError(
                "time_step {} exceeds stability limit {:g} "
                "for this spacing and alpha".format(step, limit)
            )
        start = self._config_value(config, "start_time", default=0.0)
        end = self._config_value(config, "end_time", default=float("inf"))
        self._set_clock(start, step, units="s", end=end)

        self._boundary = config.get("boundary", "dirichlet")
        if self._boundary not in ("dirichlet", "insulated"):
            raise InitializationError(
                "boundary must be 'dirichlet' or 'insulated', got {!r}".format(
                    self._boundary
                )
            )

        self._shape = (ny, nx)
        self._spacing = (dy, dx)
        field = self._declare_grid(
            "uniform_rectilinear", shape=self._shape, spacing=self._spacing
        )
        point = self._declare_grid("scalar")

        initial = self._config_value(config, "initial_value", default=0.0)
        hot = self._config_value(config, "hot_spot_value", default=100.0)
        boundary_value = self._config_value(config, "boundary_value", default=0.0)

        self._declare_output(self.FIELD, "K", field, fill=initial)
        self._declare_input(self.BOUNDARY, "K", point, required=False)
        self._declare_output(self.BOUNDARY, "K", point)
        self._values[self.BOUNDARY][0] = boundary_value

        plate = self._values[self.FIELD].reshape(self._shape)
        plate[ny // 2, nx // 2] = hot

    def _advance(self):
        dy, dx = self._spacing
        u = self._values[self.FIELD].reshape(self._shape)
        if self._boundary == "dirichlet":
            b = self._values[self.BOUNDARY][0]
            u[0, :] = b
            u[-1, :] = b
            u[:, 0] = b
            u[:, -1] = b
        # edge padding doubles as the zero-flux closure when insulated
        p = np.pad(u, 1, mode="edge")
        lap = (p[1:-1, :-2] - 2.0 * u + p[1:-1, 2:]) / (dx * dx) + (
            p[:-2, 1:-1] - 2.0 * u + p[2:, 1:-1]
        ) / (dy * dy)
        unew = u + self._alpha * self.time_step() * lap
        if self._boundary == "dirichlet":
            b = self._values[self.BOUNDARY][0]
            unew[0, :] = b
            unew[-1, :] = b
            unew[:, 0] = b
            unew[:, -1] = b
        u[:] = unew
