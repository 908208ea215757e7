from .dataset import export_dataset
from .simulate import simulate

__all__ = ("export_dataset", "simulate")
