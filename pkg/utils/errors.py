"""Error hierarchy shared by every tripdiff module.

Every error is a ``ValueError`` carrying the process exit code the
command-line front-end reports for it.
"""

import config


class TripDiffError(ValueError):
    """Base class for all tripdiff errors."""

    exit_code = config.EXIT_INTERNAL


class InputError(TripDiffError):
    """Malformed or inconsistent input data or options."""

    exit_code = config.EXIT_INPUT


class DegenerateError(TripDiffError):
    """Well-formed input whose design cannot identify the requested quantity."""

    exit_code = config.EXIT_DEGENERATE


class ResourceError(TripDiffError):
    """A configured resource guard was exceeded."""

    exit_code = config.EXIT_RESOURCE


# panel
class EmptyInput(InputError):
    pass


class DuplicateCell(InputError):
    pass


class NonBinaryTreatment(InputError):
    pass


class MixedTreatmentInCell(InputError):
    pass


class TreatmentReversal(InputError):
    pass


class TreatedAtBaseline(InputError):
    pass


class UnbalancedPanel(InputError):
    pass


# regression
class NoResidualTreatmentVariation(DegenerateError):
    pass


class SingularDesign(DegenerateError):
    pass


class NonConvergence(TripDiffError):
    pass


# decomposition
class DegenerateDesign(DegenerateError):
    pass


class TupleCapExceeded(ResourceError):
    pass


# identification
class InvalidWindow(InputError):
    pass


class EmptyCohort(DegenerateError):
    pass


class EmptyPlaceboCohort(DegenerateError):
    pass


class MissingWeight(InputError):
    pass


class UnnormalizedWeights(InputError):
    pass


# imputation
class NoControls(DegenerateError):
    pass


class EmptyEffects(InputError):
    pass


class InsufficientPretreatmentData(DegenerateError):
    pass


# inference
class TooFewClusters(InputError):
    pass


class AllDrawsFailed(DegenerateError):
    pass


# simulate
class InvalidConfig(InputError):
    pass


class UnknownDesign(InputError):
    pass
