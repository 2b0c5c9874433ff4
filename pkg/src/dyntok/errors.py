"""Exception types. Each carries a short machine-readable ``kind``."""


class DyntokError(Exception):
    kind = "error"


class ValidationError(DyntokError, ValueError):
    kind = "validation"


class DegenerateInputError(ValidationError):
    kind = "degenerate-input"


class TensorFormatError(DyntokError):
    kind = "format"


class TensorLengthError(TensorFormatError):
    kind = "length"


class TensorDtypeError(TensorFormatError):
    kind = "dtype"


class MetaMissingError(DyntokError, FileNotFoundError):
    kind = "meta-missing"
