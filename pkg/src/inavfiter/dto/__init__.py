from .abstract import AbstractDTO
from .experiment import ALGORITHMS, Algorithm, ExperimentConfig
from .iteration import DEFAULT_ITER_CONFIG, IterConfig
from .sensor import SENSOR_GRADES, Quantity, SensorGrade, SensorSpec
from .trajectory import FlightMode, TrajectoryParams

__all__ = (
    "AbstractDTO",
    "ALGORITHMS",
    "Algorithm",
    "ExperimentConfig",
    "DEFAULT_ITER_CONFIG",
    "IterConfig",
    "SENSOR_GRADES",
    "Quantity",
    "SensorGrade",
    "SensorSpec",
    "FlightMode",
    "TrajectoryParams",
)
