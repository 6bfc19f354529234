"""Common exception base for the infodemic package.

Every module-specific error derives from InfodemicError so callers (CLI,
API handlers) can distinguish domain failures from programming bugs.
"""


class InfodemicError(Exception):
    """Base class for all domain errors raised by this package."""
