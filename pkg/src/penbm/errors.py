"""Exception types shared across the package."""


class PenbmError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PenbmError):
    """Invalid grid, ladder, or experiment configuration."""


class AdmissibilityError(PenbmError):
    """A weight family violates one of its admissibility hypotheses.

    The ``condition`` attribute names the specific violated hypothesis,
    e.g. ``"H(l)=1 at finite l"`` or ``"tail integral divergent"``.
    """

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        msg = condition if not detail else f"{condition}: {detail}"
        super().__init__(msg)


class AbsorbedStateError(PenbmError):
    """Drift requested at a state where the martingale has hit zero."""
