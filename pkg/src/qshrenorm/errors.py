"""Exception hierarchy shared by the library and the command line."""


class AlgebraError(ValueError):
    """Base class for every error raised by qshrenorm."""


class RingMismatchError(AlgebraError):
    """Operands live in different coefficient rings."""


class PrecisionError(AlgebraError):
    """A coefficient outside the known window was requested."""


class EssentialSingularityError(AlgebraError):
    """exp of a pole, which is not a Laurent series."""


class UndefinedHalfProductError(AlgebraError):
    """A half product (< or >) was applied to the empty word."""


class ConilpotencyError(AlgebraError):
    """An iterated reduced coproduct did not vanish beyond the grade."""


class InadmissibleDecompositionError(AlgebraError):
    """Lambda coefficients need a first block of length one."""


class ModelHypothesisError(AlgebraError):
    """The inputs violate a structural hypothesis (commutativity, coalgebra type...)."""


class ResonanceError(ModelHypothesisError):
    """A small denominator vanishes identically and no regulator is present."""


class ParseError(AlgebraError):
    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line = line
        self.column = col
        super().__init__(f"{message} (line {line}, column {col})")
