"""Exception types shared across the package."""


class AquapipeError(Exception):
    """Base class for all errors raised by this package."""


class ImageIOError(AquapipeError):
    """A file could not be read or written."""


class ImageFormatError(AquapipeError):
    """A file was readable but not decodable as a supported image."""


class PreconditionError(AquapipeError, ValueError):
    """An argument or buffer violates an operation's contract."""


class DegenerateInputError(AquapipeError, ValueError):
    """Input is valid but degenerate for the operation (e.g. all-black image)."""


class ConfigError(AquapipeError):
    """Configuration file or value is invalid."""


class StageError(AquapipeError):
    """A pipeline stage failed; carries the stage name and the original error."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
