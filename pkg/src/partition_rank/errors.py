"""
Exception types for partition-rank.

Every error raised by the library carries a short machine-readable code and a
human-readable message, and knows the CLI exit status it maps to.
"""

from typing import Optional


class PartitionRankError(Exception):
    """Base error for every solver, parser and validation failure."""

    exit_status = 2

    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(f"Partition Rank Error {code}: {message}")


class DomainError(PartitionRankError):
    """A quantity is undefined for the given arguments (empty S*, c = 0, ...)."""

    def __init__(self, message: str):
        super().__init__("DOMAIN", message)


class ValidityError(PartitionRankError):
    """An instance or partition violates its structural invariants."""

    def __init__(self, message: str):
        super().__init__("INVALID", message)


class CaseError(PartitionRankError):
    """The instance lies outside the special case a solver handles."""

    def __init__(self, message: str):
        super().__init__("CASE", message)


class VariantError(PartitionRankError):
    """A hierarchy solver was called with non-singleton item classes."""

    def __init__(self, message: str):
        super().__init__("VARIANT", message)


class ConnectivityError(PartitionRankError):
    """A circulant specification describes a disconnected graph."""

    def __init__(self, message: str):
        super().__init__("DISCONNECTED", message)


class ParseError(PartitionRankError):
    """Malformed inventory listing or instance file."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__("PARSE", message)


class UnknownCategoryError(PartitionRankError):
    """A CRT code does not resolve to a node of the category tree."""

    def __init__(self, code: str):
        self.category = code
        super().__init__("LOOKUP", f"unknown category code '{code}'")


class InfeasibleError(PartitionRankError):
    """No admissible decomposition exists."""

    exit_status = 3

    def __init__(self, message: str):
        super().__init__("INFEASIBLE", message)


class SizeLimitError(PartitionRankError):
    """An exhaustive enumeration would exceed its configured cap."""

    exit_status = 4

    def __init__(self, size: int, limit: int, what: str = "non-special vertices"):
        self.size = size
        self.limit = limit
        super().__init__("SIZE_LIMIT", f"{size} {what} exceeds the limit of {limit}")
