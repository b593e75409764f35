"""Exception types shared across the toolkit."""


class PhiloscopeError(Exception):
    """Base class for all toolkit errors."""


class DataError(PhiloscopeError):
    """Malformed or inconsistent input data (bad file, schema violation, failed join)."""


class DiscrepancyError(DataError):
    """Cross-table disagreement surfaced under strict loading."""


class MetricError(PhiloscopeError):
    """Invalid input to a lexical metric (e.g. empty segment)."""


class StatsError(PhiloscopeError):
    """Degenerate statistical input (zero variance, too few points)."""
