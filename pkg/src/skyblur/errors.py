"""Exception hierarchy."""


class SkyBlurError(Exception):
    """Base class for every error raised by this package."""


class MalformedImage(SkyBlurError):
    pass


class UnsupportedFormat(SkyBlurError):
    pass


class RoiOutOfBounds(SkyBlurError):
    pass


class ImageTooSmall(SkyBlurError):
    pass


class EmptyCalibrationSet(SkyBlurError):
    pass


class EmptyEvaluationSet(SkyBlurError):
    pass


class DirectoryNotFound(SkyBlurError):
    pass


class ConfigInvalid(SkyBlurError):
    pass


class ConfigParseError(ConfigInvalid):
    """Raised when a config file cannot be parsed.

    ``field`` names the offending key (if any) and ``line`` the 1-based line
    of a JSON syntax error (if any).
    """

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if field is not None:
            parts.append(f"field `{field}`")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.field = field
        self.line = line


class ManifestParseError(SkyBlurError):
    pass


class DuplicatePath(ManifestParseError):
    pass
