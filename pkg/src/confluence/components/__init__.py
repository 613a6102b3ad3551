"""Bundled reference components, keyed by short class names."""

from ..component import ComponentError
from .faulty import NanSource
from .forcing import SinusoidForcing
from .heat import HeatDiffusion2D
from .predator_prey import PredatorPopulation, PreyPopulation

COMPONENT_CLASSES = {
    "heat2d": HeatDiffusion2D,
    "lv_prey": PreyPopulation,
    "lv_predator": PredatorPopulation,
    "forcing": SinusoidForcing,
    "nan_source": NanSource,
}


class UnknownComponentError(ComponentError):
    """No component class is registered under the requested name."""

    def __init__(self, name):
        super().__init__(
            "unknown component class {!r}; available: {}".format(
                name, ", ".join(sorted(COMPONENT_CLASSES))
            )
        )


def resolve_component(name):
    """Map a short class name like 'heat2d' to its component class."""
    try:
        return COMPONENT_CLASSES[name]
    except KeyError:
        raise UnknownComponentError(name) from None
