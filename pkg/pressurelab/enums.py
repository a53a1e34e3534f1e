"""
Enumerated sequences of mutually associated named constants.
"""

__author__ = 'pressurelab developers'


class PressureMethod:
    """
    How a classical pressure value was obtained.
    """

    EXACT_DEPTH1 = 'exact-depth1'      # Closed-form log-sum-exp
    SPECTRAL_DEPTHK = 'spectral-depthk'  # Power iteration on the transfer matrix
    EMPIRICAL_N = 'empirical-n'        # Finite-horizon partition quotient

    @classmethod
    def iter(cls):
        """Iterate over the enumerated values."""
        return iter((cls.EXACT_DEPTH1, cls.SPECTRAL_DEPTHK, cls.EMPIRICAL_N))

    @classmethod
    def is_valid(cls, value):
        """Return whether the value belongs to this enumerated sequence."""
        return isinstance(value, str) and value in cls.iter()


class Regime:
    """
    Where zero sits relative to the range of asymptotic step averages.
    """

    INTERIOR = 'interior'
    BOUNDARY_LOWER = 'boundary-lower'
    BOUNDARY_UPPER = 'boundary-upper'
    EMPTY = 'empty'

    @classmethod
    def iter(cls):
        """Iterate over the enumerated values."""
        return iter((cls.INTERIOR, cls.BOUNDARY_LOWER, cls.BOUNDARY_UPPER, cls.EMPTY))

    @classmethod
    def is_valid(cls, value):
        """Return whether the value belongs to this enumerated sequence."""
        return isinstance(value, str) and value in cls.iter()

    @classmethod
    def is_boundary(cls, value):
        """Return whether the value is one of the two boundary regimes."""
        return value in (cls.BOUNDARY_LOWER, cls.BOUNDARY_UPPER)


class GrowthTag:
    """
    Heuristic growth classes for the partial sums of a recurrence series.
    """

    LOG_LIKE = 'log-like'
    LINEAR_LIKE = 'linear-like'
    BOUNDED_SUSPECT = 'bounded-suspect'

    @classmethod
    def iter(cls):
        """Iterate over the enumerated values."""
        return iter((cls.LOG_LIKE, cls.LINEAR_LIKE, cls.BOUNDED_SUSPECT))

    @classmethod
    def is_valid(cls, value):
        """Return whether the value belongs to this enumerated sequence."""
        return isinstance(value, str) and value in cls.iter()


class Orientation:
    """
    How the Bernoulli weights of a published closed-form spectrum are assigned to branches.
    """

    PRINTED = 'printed'    # The formula exactly as published
    MIRRORED = 'mirrored'  # Branch roles exchanged, i.e. alpha replaced by -alpha

    @classmethod
    def iter(cls):
        """Iterate over the enumerated values."""
        return iter((cls.PRINTED, cls.MIRRORED))

    @classmethod
    def is_valid(cls, value):
        """Return whether the value belongs to this enumerated sequence."""
        return isinstance(value, str) and value in cls.iter()


class Subcommand:
    """
    The subcommands understood by the command line front end.
    """

    PRESSURE = 'pressure'
    FIBRE = 'fibre'
    SPECTRUM = 'spectrum'
    GAP = 'gap'
    GAP_SWEEP = 'gap-sweep'
    ZETA = 'zeta'
    SIMULATE = 'simulate'
    VERIFY = 'verify'

    @classmethod
    def iter(cls):
        """Iterate over the enumerated values."""
        return iter((cls.PRESSURE, cls.FIBRE, cls.SPECTRUM, cls.GAP, cls.GAP_SWEEP, cls.ZETA, cls.SIMULATE,
                     cls.VERIFY))

    @classmethod
    def is_valid(cls, value):
        """Return whether the value belongs to this enumerated sequence."""
        return isinstance(value, str) and value in cls.iter()

    @classmethod
    def needs_model(cls, value):
        """Return whether the subcommand operates on a branch model."""
        return value not in (cls.GAP_SWEEP, cls.VERIFY)


class OutputFormat:
    """
    The supported result file formats.
    """

    CSV = 'csv'
    JSON = 'json'

    @classmethod
    def iter(cls):
        """Iterate over the enumerated values."""
        return iter((cls.CSV, cls.JSON))

    @classmethod
    def is_valid(cls, value):
        """Return whether the value belongs to this enumerated sequence."""
        return isinstance(value, str) and value in cls.iter()
