"""portgnn - port-numbered graph neural networks and the local algorithms they compute."""

from .version import __version__

__all__ = ["__version__"]
