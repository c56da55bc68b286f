class CardexError(Exception):
    """Base class for errors raised on bad input data or models."""


class DataError(CardexError, ValueError):
    pass


class SupervisionError(CardexError, ValueError):
    """Labels violate the supervision contract (e.g. CARD on a non-candidate)."""


class ModelFormatError(CardexError, ValueError):
    pass
