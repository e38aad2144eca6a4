class Error(Exception):
    """
    Indicates something has gone wrong while running nefflow
    """


class ArgError(Error):
    """
    Indicates that a user-facing argument has an invalid value
    """


class ParseError(Error):
    """
    Indicates that an expression or file does not follow the expected grammar.
    `position` is the 0-based character offset of the offending token, if known.
    """

    def __init__(self, msg, position=None):
        if position is not None:
            msg = f"{msg} (at position {position})"
        super().__init__(msg)
        self.position = position


class DimensionError(Error):
    """
    Indicates that objects of different ambient dimension were combined
    """


class SingularError(Error):
    """
    Indicates a singular group element or a point on the hyperplane c^T m + d = 0
    """


class NotAnalyticError(Error):
    """
    Indicates that a vanishing-denominator division has no power series solution
    """


class NotGradientError(Error):
    """
    Indicates a vector series whose mixed partials disagree
    """


class NotNnTypeError(Error):
    """
    Indicates a variance function that does not come from a measure on N^n
    normalized so that phi'(0) = (1, ..., 1)
    """


class RegionError(Error):
    """
    Indicates a group element outside the subgroup an operation requires
    """


class DecompositionError(Error):
    """
    Indicates that a group element could not be factored
    """


class ShapeError(Error):
    """
    Indicates a variance function without the a*mm^T + B(m) + C shape
    """


class StageError(Error):
    """
    Let the user know that something went wrong while
    firing a pipeline stage
    """


class ConvergenceError(Error):
    """
    Indicates that a truncated infinite sum does not look convergent
    """
