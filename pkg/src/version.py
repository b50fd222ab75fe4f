"""Version information for portgnn."""

__version__ = "0.1.0"


def get_version() -> str:
    """Get package version.

    Returns:
        Version string
    """
    return __version__
