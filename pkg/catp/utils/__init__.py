"""
Utils package for CATP.

To avoid circular imports, import functions directly:
- from catp.utils.report_format import dump_report, load_report, dump_reports, load_reports
- from catp.utils import SplitMix64, derive_seed, tool_version
"""

from .prng import SplitMix64, derive_seed, mix64
from .version_utils import get_installed_version, tool_version

__all__ = [
    "SplitMix64",
    "derive_seed",
    "mix64",
    "get_installed_version",
    "tool_version",
]
