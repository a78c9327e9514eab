"""Exception types shared by all erfeo3 modules."""


class ErFeO3Error(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ErFeO3Error):
    """Bad configuration input: unknown unit, unknown key, malformed file."""


class DegenerateParameterError(ErFeO3Error):
    """Parameter combination makes an expression ill-defined (e.g. zero denominator)."""


class InstabilityError(ErFeO3Error):
    """Parameters leave the stable high-symmetry regime (negative radicand,
    indefinite bosonic Hamiltonian)."""


class DomainError(ErFeO3Error):
    """Operation called outside its regime of validity."""


class ModelValidityError(ErFeO3Error):
    """A result falls outside the domain of the approximation that produced it
    (e.g. a bosonization amplitude reaching the spin-length bound)."""
