"""Exception types shared across the package.

Every error raised deliberately by essmarket derives from EssMarketError,
so callers (and the CLI) can separate domain failures from genuine bugs.
"""


class EssMarketError(Exception):
    """Base class for all errors raised by this package."""


class InvariantViolation(EssMarketError):
    """A domain object failed one of its structural invariants."""


# -- registry construction ---------------------------------------------------

class DuplicateFacilityId(EssMarketError):
    """Two facilities share the same id."""


class UnknownFacilityInOffer(EssMarketError):
    """An offer references a facility id that is not registered."""


class PriceOutOfBounds(EssMarketError):
    """An offer price falls outside the configured market floor/cap."""

    def __init__(self, offer, floor: float, cap: float):
        self.offer = offer
        self.floor = floor
        self.cap = cap
        super().__init__(
            f"offer {offer.facility_id}/{offer.service.value} priced at "
            f"{offer.price} outside [{floor}, {cap}]"
        )


class UnknownFacility(EssMarketError):
    """A facility id was looked up that does not exist in the registry."""


# -- clearing ----------------------------------------------------------------

class UnboundedProblem(EssMarketError):
    """The clearing program has no finite optimum (configuration error)."""


class NumericalFailure(EssMarketError):
    """The solver failed to make progress or produced a non-finite value."""


class MismatchedInterval(EssMarketError):
    """A dispatch result was paired with the wrong interval index."""


# -- frequency simulation ----------------------------------------------------

class ZeroInertiaWithContingency(EssMarketError):
    """ROCOF requested for a non-zero contingency with no stored energy."""


class InvalidStep(EssMarketError):
    """Integration step or horizon outside the supported range."""


class NonPositiveInertia(EssMarketError):
    """Simulation requires strictly positive system kinetic energy."""


class NonPositiveLimit(EssMarketError):
    """An inversion was requested against a non-positive limit."""


# -- response scoring --------------------------------------------------------

class DegenerateTrace(EssMarketError):
    """A response trace carries no usable (positive) output."""


class NoConvergence(EssMarketError):
    """Curve fitting failed to converge to a finite optimum."""


# -- reserves ----------------------------------------------------------------

class HorizonMismatch(EssMarketError):
    """A reserve product was paired with samples of the wrong horizon."""


# -- commitment tables -------------------------------------------------------

class EmptyTable(EssMarketError):
    """A commitment table with no combinations cannot support selection."""


# -- scenario I/O ------------------------------------------------------------

class ParseError(EssMarketError):
    """A file could not be parsed; carries the path and position."""

    def __init__(self, path, message: str, line: int | None = None):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


class ValidationError(EssMarketError):
    """Parsed input failed semantic validation; carries a field locator."""

    def __init__(self, locator: str, message: str):
        self.locator = locator
        super().__init__(f"{locator}: {message}")
