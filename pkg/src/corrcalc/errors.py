"""Exception types shared across the engine.

Every error carries a ``witness`` dictionary that the command-line front end
prints as JSON, so a failing check always names the offending cell.
"""


class CorrcalcError(Exception):
    code = "error"

    def __init__(self, message="", **witness):
        super().__init__(message)
        self.message = message
        self.witness = witness

    def to_json(self):
        return {"error": self.code, "message": self.message, "witness": self.witness}


class MalformedInput(CorrcalcError):
    code = "MalformedInput"


class SizeCap(CorrcalcError):
    code = "SizeCap"


# fincat
class CategoryError(CorrcalcError):
    code = "CategoryError"


class MissingIdentity(CategoryError):
    code = "MissingIdentity"


class NonAssociative(CategoryError):
    code = "NonAssociative"


class IdentityLawFailure(NonAssociative):
    code = "IdentityLawFailure"


class CompositionGap(CategoryError):
    code = "CompositionGap"


class IncoherentComposite(CategoryError):
    code = "IncoherentComposite"


class DuplicateName(CategoryError):
    code = "DuplicateName"


class NoLimit(CorrcalcError):
    code = "NoLimit"


class NotAFunctor(CorrcalcError):
    code = "NotAFunctor"


class NotNatural(CorrcalcError):
    code = "NotNatural"


# marked
class NotClosed(CorrcalcError):
    code = "NotClosed"


class PreconditionFailed(CorrcalcError):
    code = "PreconditionFailed"


# adjoint
class NoAdjoint(CorrcalcError):
    code = "NoAdjoint"


class BoundaryMismatch(CorrcalcError):
    code = "BoundaryMismatch"


# bicat
class PentagonFailure(CorrcalcError):
    code = "PentagonFailure"


class TriangleFailure(CorrcalcError):
    code = "TriangleFailure"


class NonInvertibleCoherence(CorrcalcError):
    code = "NonInvertibleCoherence"


class CoherenceFailure(CorrcalcError):
    code = "CoherenceFailure"


# span
class MissingCertificate(CorrcalcError):
    code = "MissingCertificate"


class NonUniqueMediator(CorrcalcError):
    code = "NonUniqueMediator"


# fib
class NotOverF(CorrcalcError):
    code = "NotOverF"


class LiftFailure(CorrcalcError):
    code = "LiftFailure"


# bivariant
class BaseChangeFails(CorrcalcError):
    code = "BaseChangeFails"


class NoProducts(CorrcalcError):
    code = "NoProducts"
