"""Exception types shared across the package.

The CLI maps these onto exit codes: schema errors exit 2, window/border
errors exit 3, certification failures exit 4.
"""


class RoughCayleyError(Exception):
    """Base class for all package errors."""


class SchemaError(RoughCayleyError):
    """Malformed configuration, file contents or CLI arguments."""


class ModelMismatchError(RoughCayleyError):
    """Points from different space models were mixed in one operation."""


class DomainError(RoughCayleyError):
    """A point violates its model's coordinate constraints."""


class UnsupportedOperationError(RoughCayleyError):
    """Group operation requested on a model without group structure."""


class OutOfWindowError(RoughCayleyError):
    """A computed point left the window the map is defined on."""


class BorderError(RoughCayleyError):
    """A probe or candidate set sits too close to the window border.

    ``max_safe`` carries the largest radius that would have been safe, when
    the check has one.
    """

    def __init__(self, message, max_safe=None):
        self.max_safe = max_safe
        super().__init__(message)


class WindowTooSmallError(RoughCayleyError):
    """No candidate set of the requested family fits the certified interior."""


class UnreachableError(RoughCayleyError):
    """Graph distance requested between vertices in different components."""


class UndefinedRatioError(RoughCayleyError):
    """Folner ratio of an empty set."""


class DisconnectedGraphError(RoughCayleyError):
    """Threshold graph came out disconnected.

    Signals an inadequate window or wrong density/geodesic constants, not a
    library bug; carries the component sizes for diagnosis.
    """

    def __init__(self, component_sizes):
        self.component_sizes = sorted(component_sizes, reverse=True)
        super().__init__(
            "graph is disconnected; component sizes %s" % self.component_sizes
        )


class CertificationError(RoughCayleyError):
    """An empirical certificate failed; carries the violating witness."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message}: {witness!r}")
