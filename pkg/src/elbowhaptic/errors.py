"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or unparseable configuration.

    ``line`` and ``key`` are set whenever the error can be pinned to a
    location in a config file.
    """

    def __init__(self, message, *, line=None, key=None, path=None):
        self.line = line
        self.key = key
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.message = message


class DataError(ValueError):
    """Malformed log, trace or sweep data."""


class FitError(DataError):
    """Not enough usable samples to fit a stiffness."""


class DegenerateDataError(FitError):
    """Samples exist but do not determine a positive stiffness."""


class CalibrationError(ValueError):
    """Calibration points that cannot determine the sensor law."""
