"""Exception hierarchy shared by all dsem modules."""


class DsemError(Exception):
    """Base class for every error raised by dsem."""


class ValidationError(DsemError, ValueError):
    """Input violates a structural invariant (Hermiticity, trace, positivity)."""


class UsageError(DsemError, ValueError):
    """Arguments are well-formed individually but not valid together."""


class DegenerateInputError(DsemError, ValueError):
    pass


class CapacityError(DsemError):
    """Requested dimension exceeds a configured limit."""


class ParseError(DsemError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StructuralError(ParseError):
    """Well-formed lines describing an invalid dependency graph."""


class MissingWordError(DsemError, KeyError):
    def __init__(self, word, suggestions=()):
        self.word = word
        self.suggestions = tuple(suggestions)
        msg = f"word {word!r} not in lexicon"
        if self.suggestions:
            msg += "; did you mean: " + ", ".join(self.suggestions)
        super().__init__(msg)

    def __str__(self):
        return self.args[0]


class LexiconFormatError(DsemError):
    """Base for load failures of .dsem files."""


class BadMagicError(LexiconFormatError):
    pass


class VersionMismatchError(LexiconFormatError):
    def __init__(self, found, supported):
        self.found = found
        self.supported = supported
        super().__init__(
            f"lexicon file has format version {found}, reader supports version {supported}"
        )


class ChecksumError(LexiconFormatError):
    pass


class TruncatedFileError(LexiconFormatError):
    pass
