"""Error types shared across the engine."""


class IconError(Exception):
    """Base class for all engine errors."""


class CommandError(IconError):
    """A command was rejected; session state is unchanged.

    `code` is a stable machine-readable identifier (e.g. "UnknownCell",
    "HandOccupied") used in wire replies and tests.
    """

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}" if message else code)


class KernelError(IconError):
    """Raised inside the kernel while evaluating a statement."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class SchemaError(IconError):
    """A persisted file failed validation. `path` is a JSON-pointer-ish locator."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class CorruptLog(IconError):
    """An event log line could not be replayed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        self.message = message
        super().__init__(f"line {line_number}: {message}")
