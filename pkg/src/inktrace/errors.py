"""Typed error hierarchy.

Every failure mode documented in the public API surfaces as one of these,
so CLI and HTTP layers can report a stable error name.
"""


class InkError(Exception):
    """Base class; ``name`` is the stable, machine-readable identifier."""

    name = "InkError"

    def __init__(self, detail: str = ""):
        self.detail = detail
        super().__init__(detail or self.name)

    def __str__(self) -> str:
        return f"{self.name}: {self.detail}" if self.detail else self.name


# --- stroke log -------------------------------------------------------------

class MalformedJson(InkError):
    name = "MalformedJson"


class MissingField(InkError):
    name = "MissingField"

    def __init__(self, field: str, where: str = ""):
        self.field = field
        super().__init__(f"missing field {field!r}" + (f" in {where}" if where else ""))


class InvalidEnum(InkError):
    name = "InvalidEnum"


class EmptyPoints(InkError):
    name = "EmptyPoints"


class DuplicateOrder(InkError):
    name = "DuplicateOrder"


# --- kinematics -------------------------------------------------------------

class NotAStroke(InkError):
    name = "NotAStroke"


class TooFewPoints(InkError):
    name = "TooFewPoints"


class TooFewSamples(InkError):
    name = "TooFewSamples"


class ZeroEnergyProfile(InkError):
    name = "ZeroEnergyProfile"


# --- annotations ------------------------------------------------------------

class UnknownLabel(InkError):
    name = "UnknownLabel"


class PartWithoutParent(InkError):
    name = "PartWithoutParent"


class BoxOutOfCanvas(InkError):
    name = "BoxOutOfCanvas"


# --- remote clients ---------------------------------------------------------

class Unreachable(InkError):
    name = "Unreachable"


class Timeout(InkError):
    name = "Timeout"


class BadResponse(InkError):
    name = "BadResponse"

    def __init__(self, detail: str = "", status: int | None = None):
        self.status = status
        super().__init__(detail if status is None else f"status {status}: {detail}")


# --- retrieval --------------------------------------------------------------

class InvalidParams(InkError):
    name = "InvalidParams"


class LengthMismatch(InkError):
    name = "LengthMismatch"


class InvalidK(InkError):
    name = "InvalidK"


class EmptyIndex(InkError):
    name = "EmptyIndex"


class EmptyCorpus(InkError):
    name = "EmptyCorpus"


class ProviderMismatch(InkError):
    name = "ProviderMismatch"


class DimensionMismatch(InkError):
    name = "DimensionMismatch"
