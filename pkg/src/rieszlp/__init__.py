"""Vector-lattice L^p machinery at desk scale, with moment and stochastic operators."""

from .lattice import LatticeElement, OrderUnit, join_meet_abs, m_norm, mul, power, unit, zero

__all__ = ["LatticeElement", "OrderUnit", "join_meet_abs", "m_norm", "mul", "power", "unit", "zero"]
__version__ = "0.1.0"
