"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid run configuration (unknown key, bad value, violated invariant)."""

    def __init__(self, message, key=None, line=None):
        loc = []
        if key is not None:
            loc.append(f"key '{key}'")
        if line is not None:
            loc.append(f"line {line}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.key = key
        self.line = line


class CapabilityError(RuntimeError):
    """Requested operation exceeds what the dense engine can represent."""


class IntegrationError(RuntimeError):
    """Time integration failed; carries the last good state."""

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class IntegrityError(IntegrationError):
    """State integrity lost during integration (trace drift)."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
