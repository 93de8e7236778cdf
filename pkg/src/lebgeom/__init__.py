"""Geometry of the Lebesgue function of polynomial interpolation on [-1, 1] and [-1, 1]^2."""

__version__ = "0.1.0"

from .errors import LebesgueError  # noqa: E402
from .nodes1d import NodeSet1D, generate  # noqa: E402
from .nodes2d import NodeSet2D, generate2d  # noqa: E402
from .precision import PrecisionContext  # noqa: E402

__all__ = ["LebesgueError", "NodeSet1D", "NodeSet2D", "PrecisionContext", "generate", "generate2d",
           "__version__"]
