"""Shared exception types."""


class AdvtaxError(Exception):
    """Base class for domain errors raised by this package."""


class NotFound(AdvtaxError):
    pass


class VersionOrder(AdvtaxError):
    pass


class ParseError(AdvtaxError):
    def __init__(self, message, locus=None):
        super().__init__(message if locus is None else f"{locus}: {message}")
        self.locus = locus


class ValidationError(AdvtaxError):
    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class FileUnreadable(AdvtaxError):
    pass


class HeaderMismatch(AdvtaxError):
    pass


class InvalidRange(AdvtaxError):
    pass


class UnknownLeaf(NotFound):
    pass


class UnknownTaxonomyVersion(NotFound):
    pass


class UnknownReport(NotFound):
    pass


class BadDifficulty(AdvtaxError):
    pass


class PrimaryNotInTags(AdvtaxError):
    pass


class EmptyDefinition(AdvtaxError):
    pass


class DuplicateLeafId(AdvtaxError):
    pass


class DuplicateLeafName(AdvtaxError):
    pass


class BadStaging(AdvtaxError):
    pass


class BadAxis(AdvtaxError):
    pass


class EmptyTags(AdvtaxError):
    pass
