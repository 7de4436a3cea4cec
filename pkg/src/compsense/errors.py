"""Exception hierarchy shared across the package.

Exit codes used by the CLI: 1 runtime error, 2 usage (argparse), 3 data
validation, 4 fingerprint mismatch.
"""


class CompsenseError(Exception):
    exit_code = 1


class DataValidationError(CompsenseError):
    exit_code = 3


class FingerprintMismatchError(CompsenseError):
    """A model is being applied with a vocabulary it was not trained on."""

    exit_code = 4


class PtbParseError(DataValidationError):
    """Malformed Penn-Treebank S-expression; carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset
