"""Exception hierarchy shared across the package.

Every error raised by voltpick derives from VoltpickError so callers can
catch the whole family.  CLI exit codes: plain VoltpickError subclasses map
to exit code 1 (user or config problem), EnvironmentFailure subclasses map
to exit code 2 (host cannot satisfy the request).
"""

from __future__ import annotations


class VoltpickError(Exception):
    """Base class for all voltpick errors."""


class EnvironmentFailure(VoltpickError):
    """The host environment cannot satisfy the request."""


# --- metering ---------------------------------------------------------------

class BackendUnavailable(EnvironmentFailure):
    """No readable counter source for the requested meter backend."""


class InvalidConfig(VoltpickError):
    """A configuration object is internally inconsistent."""


class ReadFailure(EnvironmentFailure):
    """A counter read failed mid-span (I/O error, exhausted script, ...)."""


class TokenReuse(VoltpickError):
    """A span token was passed to span_end more than once."""


# --- benchmarking -----------------------------------------------------------

class MeterFailure(EnvironmentFailure):
    """The meter failed while a benchmark series was running."""


class NotMeasured(VoltpickError):
    """Summary statistics requested for a series that was never measured."""


class EmptyGroup(VoltpickError):
    """An operation over a group of series found nothing measured."""


class HarnessBusy(VoltpickError):
    """A second metered series was started while one is already running."""


# --- profiles ---------------------------------------------------------------

class UnknownImplementation(VoltpickError):
    """An implementation identifier is not present in the profile/registry."""


class ApiKindMismatch(VoltpickError):
    """Two implementations (or a site and an implementation) disagree on kind."""


class UnknownApiKind(VoltpickError):
    """An API kind is not covered by the profile or registry."""


class SchemaVersionMismatch(VoltpickError):
    """A persisted file declares a schema version this build does not speak."""


class MalformedProfile(VoltpickError):
    """A profile file does not conform to the schema."""


# --- usage analysis ---------------------------------------------------------

class DecodeError(VoltpickError):
    """A source file is not valid UTF-8."""


class PatternError(VoltpickError):
    """A language profile contains an invalid pattern or mapping."""


class MalformedReport(VoltpickError):
    """A usage report file does not conform to the schema."""


class UnknownIdentifier(VoltpickError):
    """A usage report references an implementation or operation nobody registered."""


# --- recommendation ---------------------------------------------------------

class Incomparable(VoltpickError):
    """An implementation lacks a measured entry for an operation a site uses.

    Signals exclusion from candidacy at that site, not a failure.
    """

    def __init__(self, impl_id: str, op_id: str):
        super().__init__(f"{impl_id} has no measured entry for {op_id}")
        self.impl_id = impl_id
        self.op_id = op_id


class NoCandidates(VoltpickError):
    """Every implementation is incomparable for a site."""


class ApiCoverageError(VoltpickError):
    """The profile does not cover an API kind the usage report needs."""


# --- patching ---------------------------------------------------------------

class StaleSite(VoltpickError):
    """A recommendation's site no longer resolves in the present source."""


class TemplateMissing(VoltpickError):
    """The language profile cannot render a constructor token for an impl."""


class OverlapError(VoltpickError):
    """Two patches inside one file overlap."""
