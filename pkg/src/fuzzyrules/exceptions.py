"""Exception types shared across the package."""


class DataError(Exception):
    """Input data violates a contract (bad CSV, bad table, bad model file)."""


class ParseError(DataError):
    """A cell or row of an input file could not be parsed."""

    def __init__(self, message, row=None, column=None):
        coords = []
        if row is not None:
            coords.append(f"row {row}")
        if column is not None:
            coords.append(f"column {column}")
        if coords:
            message = f"{message} ({', '.join(coords)})"
        super().__init__(message)
        self.row = row
        self.column = column


class FormatError(DataError):
    """A model file is structurally malformed."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{message} (field: {field})"
        super().__init__(message)
        self.field = field


class VersionError(FormatError):
    """A model file declares an unsupported schema version."""
