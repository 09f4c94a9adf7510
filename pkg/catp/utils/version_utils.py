"""
Version utilities for CATP.
Resolves the installed package version stamped into report metadata.
"""

from importlib.metadata import PackageNotFoundError, version

DISTRIBUTION_NAME = "catp-prune"
UNINSTALLED_VERSION = "0.0.0+local"


def get_installed_version(package_name: str) -> str:
    """
    Get the version of an installed package.

    Args:
        package_name (str): Name of the installed package

    Returns:
        str: Version string of the installed package

    Raises:
        PackageNotFoundError: If the package is not installed
    """
    try:
        return version(package_name)
    except PackageNotFoundError:
        raise PackageNotFoundError(f"Package '{package_name}' not found")


def tool_version() -> str:
    """Version of this tool, or a local marker when running from a checkout."""
    try:
        return get_installed_version(DISTRIBUTION_NAME)
    except PackageNotFoundError:
        return UNINSTALLED_VERSION

