"""Exception types shared across the package."""

from __future__ import annotations


class VohoError(Exception):
    """Base class for package-specific failures."""


class ConfigError(VohoError):
    """Invalid study configuration; carries every violation found."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


class DataError(VohoError):
    """Input data unusable: missing, malformed, or empty after filtering."""


class DataFormatError(DataError):
    """Malformed header or row in an input file."""


class AllInstrumentsFailedError(VohoError):
    """Every eligible instrument failed while running the study."""
