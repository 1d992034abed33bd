"""Exception hierarchy. Each error carries the CLI exit code it maps to."""

from __future__ import annotations

from pydantic import ValidationError


class DrakeLimitError(Exception):
    exit_code: int = 1


class ValidationFailure(DrakeLimitError, ValueError):
    """Invalid input: priors, scenarios, ranges or out-of-domain arguments."""

    exit_code = 2

    def __init__(self, violations: list[str] | str) -> None:
        if isinstance(violations, str):
            violations = [violations]
        self.violations: list[str] = list(violations)
        super().__init__("; ".join(self.violations))

    @classmethod
    def from_pydantic(cls, exc: ValidationError, prefix: str = "") -> "ValidationFailure":
        """Flatten a pydantic error into "<field>: <rule>" violations."""
        violations = []
        for err in exc.errors():
            loc = ".".join(str(part) for part in err["loc"])
            if prefix:
                loc = f"{prefix}.{loc}" if loc else prefix
            msg = err["msg"].removeprefix("Value error, ")
            violations.append(f"{loc or '<root>'}: {msg}")
        return cls(violations)


class ScenarioIOError(DrakeLimitError):
    """A file could not be read or written; the message names the path."""

    exit_code = 1

    def __init__(self, path: str, reason: str) -> None:
        self.path = path
        super().__init__(f"{path}: {reason}")
