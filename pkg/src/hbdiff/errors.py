"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A problem hypothesis failed on the supplied data.

    Parameters
    ----------
    failures : list of str
        Human-readable statements of the violated hypotheses, e.g.
        ``"psi(0) = 0 (boundary compatibility)"``.
    """

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("validation failed: " + "; ".join(self.failures))


class IllPosedError(RuntimeError):
    """The inverse reconstruction hit a vanishing denominator.

    ``mode`` is the offending sine mode index, ``denominator`` the value
    that fell below the configured margin.
    """

    def __init__(self, mode, denominator, margin):
        self.mode = int(mode)
        self.denominator = float(denominator)
        self.margin = float(margin)
        super().__init__(
            f"ill-posed reconstruction: denominator 1 - E(T) = {denominator:.3e} "
            f"for mode k={mode} is below the margin {margin:.1e}"
        )
