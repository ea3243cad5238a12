"""Exception taxonomy for the whole engine.

Every failure mode that a caller can act on gets its own class; everything
derives from IwacalcError so batch drivers can catch one thing.  Input
parsing problems raise InputError subclasses (CLI exit code 2), congruence
and precision failures have their own branches (exit codes 1 and 3).
"""


class IwacalcError(Exception):
    """Base class for all engine errors."""


class InputError(IwacalcError):
    """Malformed or inconsistent user input (files, parameters, datums)."""


class BadInput(InputError):
    pass


class DatumError(InputError):
    """A group/pro-l datum violates its structural invariants."""


class BadSubgroupIndex(InputError):
    pass


class IncompatibleDatum(InputError):
    pass


class NotNormal(InputError):
    pass


class InertiaNotNormalInD(InputError):
    pass


class BadAuxiliary(InputError):
    pass


class PrecisionExhausted(IwacalcError):
    """A value is indistinguishable from zero, or a division cannot be
    performed, at the working precision."""


class NonUnit(IwacalcError):
    pass


class NotOneUnit(IwacalcError):
    pass


class NotAOneUnit(NotOneUnit):
    pass


class InLIdeal(IwacalcError):
    """Series lies in the coefficient maximal ideal; not localizable."""


class CongruenceFails(IwacalcError):
    """A hypothesis congruence (quotient = 1 mod the stated ideal) fails."""


class Condition3Fails(CongruenceFails):
    pass


class CycloLevelTooSmall(InputError):
    """Character values need roots of unity beyond the context level m."""


class NonIntegerDecomposition(IwacalcError):
    """Virtual-character decomposition came out non-integral; upstream bug."""


class NotIntegral(IwacalcError):
    pass


class NotMonomial(IwacalcError):
    pass


class SingularMatrix(IwacalcError):
    pass


class NotInGammaBarComponent(IwacalcError):
    """Fourier-inverted data does not descend along the bar map."""


class NotAInvariant(IwacalcError):
    pass


class SeriesDivergence(IwacalcError):
    pass


class HypothesisViolation(InputError):
    pass


class PoleAtTrivial(IwacalcError):
    pass


class TruncationDominates(IwacalcError):
    """Requested comparison digits exceed what the series tail supports."""
