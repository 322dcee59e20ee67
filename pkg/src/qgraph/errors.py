"""Exception hierarchy. Every error raised by the library derives from QGraphError."""


class QGraphError(ValueError):
    pass


class NotHermitian(QGraphError):
    pass


class NotPositive(QGraphError):
    pass


class DimensionMismatch(QGraphError):
    pass


class ShapeMismatch(QGraphError):
    pass


class ParentMismatch(QGraphError):
    pass


class NotProjection(QGraphError):
    pass


class NotInvariant(QGraphError):
    pass


class NotReal(QGraphError):
    pass


class NotBimodule(QGraphError):
    pass


class GramNotIdentity(QGraphError):
    pass


class InvalidSpec(QGraphError):
    pass


class BadRank(QGraphError):
    pass
