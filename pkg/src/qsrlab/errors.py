"""Exception types shared across the package."""


class GuardError(ValueError):
    """A size guard for exact enumeration was exceeded.

    The message always names the violated limit, e.g. ``"t(m+n) <= 24"``.
    """


class ConsistencyError(RuntimeError):
    """Two independent computation routes disagreed (an internal bug, not user error)."""
