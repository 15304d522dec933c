"""
Search limits and the shared error base for popaug.

Every exhaustive routine in the package (oracle enumeration, exact
augmentation, the 1-in-3 SAT solver) takes one of these frozen limit
models. Exceeding a limit raises GuardExceededError; nothing is ever
silently truncated.
"""

from pydantic import BaseModel, ConfigDict, Field


class PopaugError(Exception):
    """Base class of every error raised by popaug."""


class GuardExceededError(PopaugError, RuntimeError):
    """A search space is larger than the configured limit allows."""

    def __init__(self, what: str, size: int, limit: int):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: {size} exceeds limit {limit}")


class _Limits(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def check(self, field_name: str, size: int, what: str) -> None:
        """Raise GuardExceededError if ``size`` is above the named limit."""
        limit = getattr(self, field_name)
        if size > limit:
            raise GuardExceededError(what, size, limit)


class SearchLimits(_Limits):
    """Bound on the number of copy vectors exact augmentation may visit."""

    max_states: int = Field(default=10**6, gt=0)


class OracleLimits(_Limits):
    """Guards for the brute-force reference implementations."""

    max_people: int = Field(default=12, gt=0)
    max_item_clones: int = Field(default=16, gt=0)
    max_matchings: int = Field(default=2_000_000, gt=0)
    max_copy_vectors: int = Field(default=10**6, gt=0)


class SatLimits(_Limits):
    """Variable bound for the backtracking 1-in-3 SAT solver."""

    max_vars: int = Field(default=24, gt=0)


DEFAULT_SEARCH_LIMITS = SearchLimits()
DEFAULT_ORACLE_LIMITS = OracleLimits()
DEFAULT_SAT_LIMITS = SatLimits()
