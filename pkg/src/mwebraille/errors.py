"""Exception hierarchy shared by every stage.

Anything deriving from :class:`DataError` is a problem with an input file or
value (the CLI maps it to exit code 2); programming errors are left as the
usual built-in exceptions.
"""


class DataError(ValueError):
    """Bad input data."""


class TreeSyntaxError(DataError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnbalancedBrackets(TreeSyntaxError):
    def __init__(self, position):
        super().__init__("unbalanced brackets", position)


class EmptyNode(TreeSyntaxError):
    def __init__(self, position):
        super().__init__("node without a label", position)


class TrailingInput(TreeSyntaxError):
    def __init__(self, position):
        super().__init__("unexpected input after the tree", position)


class MalformedNode(TreeSyntaxError):
    def __init__(self, position, detail="malformed node"):
        super().__init__(detail, position)


class InvalidAddress(DataError):
    def __init__(self, address):
        super().__init__(f"invalid node address {list(address)}")
        self.address = tuple(address)


class LineError(DataError):
    """An error tied to a line of an input file (1-based)."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line
