"""Exception types shared across the package.

Every error carries a stable ``code`` string so the CLI can emit
machine-readable records.
"""


class LinvolError(Exception):
    code = "Error"

    def __init__(self, message="", **context):
        super().__init__(message)
        self.context = context

    def record(self):
        return {"code": self.code, "message": str(self), "context": self.context}


class NotTwoToOne(LinvolError):
    code = "NotTwoToOne"


class EmptyRow(LinvolError):
    code = "EmptyRow"


class Reducible(LinvolError):
    code = "Reducible"


class BalanceViolated(LinvolError):
    code = "BalanceViolated"


class NonPositiveLength(LinvolError):
    code = "NonPositiveLength"


class SingularPoint(LinvolError):
    code = "SingularPoint"


class Tie(LinvolError):
    code = "Tie"


class UndefinedMove(LinvolError):
    code = "UndefinedMove"


class NonComposable(LinvolError):
    code = "NonComposable"


class TooFewBlocks(LinvolError):
    code = "TooFewBlocks"


class DegenerateQuotient(LinvolError):
    code = "DegenerateQuotient"


class UnsupportedRepresentation(LinvolError):
    code = "UnsupportedRepresentation"


class NonFiniteVariation(LinvolError):
    code = "NonFiniteVariation"


class OrbitHitsSingularity(LinvolError):
    code = "OrbitHitsSingularity"


class DiagnosticsFailed(LinvolError):
    code = "DiagnosticsFailed"


class NotConverged(LinvolError):
    code = "NotConverged"


class EmptyPolytope(LinvolError):
    code = "EmptyPolytope"


class InvalidSubset(LinvolError):
    code = "InvalidSubset"


class IoError(LinvolError):
    code = "IoError"
