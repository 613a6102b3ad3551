"""Predator and prey population models, one species per component.

Together they form the classic two-species oscillator, but each side
only integrates its own density and reads the other species' density
through an input port.  Running them coupled reproduces the joint
system under a lagged exchange.
"""

from ..component import Component

PREY = "ecosystem_prey__population_density"
PREDATOR = "ecosystem_predator__population_density"


class _Species(Component):
    def _common_clock(self, config):
        step = self._config_value(config, "time_step", default=0.01)
        start = self._config_value(config, "start_time", default=0.0)
        end = self._config_value(config, "end_time", default=float("inf"))
        self._set_clock(start, step, units="s", end=end)


class PreyPopulation(_Species):
    """Prey density: grows on its own, shrinks when predators are around."""

    _COMPONENT_NAME = "lv_prey"

    def _configure(self, config):
        self._common_clock(config)
        self._growth = self._config_value(config, "growth_rate", default=1.0)
        self._predation = self._config_value(config, "predation_rate", default=0.5)
        initial = self._config_value(config, "initial_density", default=2.0)
        seen = self._config_value(config, "predator_density", default=1.0)
        point = self._declare_grid("scalar")
        self._declare_output(PREY, "1", point, fill=initial)
        self._declare_input(PREDATOR, "1", point, fill=seen)

    def _advance(self):
        x = self._values[PREY][0]
        y = self._values[PREDATOR][0]
        x += self.time_step() * (self._growth * x - self._predation * x * y)
        self._values[PREY][0] = max(x, 0.0)


class PredatorPopulation(_Species):
    """Predator density: dies off alone, grows by consuming prey."""

    _COMPONENT_NAME = "lv_predator"

    def _configure(self, config):
        self._common_clock(config)
        self._death = self._config_value(config, "death_rate", default=0.75)
        self._conversion = self._config_value(config, "conversion_rate", default=0.25)
        initial = self._config_value(config, "initial_density", default=1.0)
        seen = self._config_value(config, "prey_density", default=2.0)
        point = self._declare_grid("scalar")
        self._declare_output(PREDATOR, "1", point, fill=initial)
        self._declare_input(PREY, "1", point, fill=seen)

    def _advance(self):
        y = self._values[PREDATOR][0]
        x = self._values[PREY][0]
        y += self.time_step() * (-self._death * y + self._conversion * x * y)
        self._values[PREDATOR][0] = max(y, 0.0)
