"""Exception types raised by hqwalk."""


class WalkError(ValueError):
    """Invalid walk description or unknown builtin walk."""


class NonUnitaryError(WalkError):
    """The symbol fails the sampled unitarity check."""

    def __init__(self, max_deviation, worst_k):
        self.max_deviation = float(max_deviation)
        self.worst_k = tuple(float(x) for x in worst_k)
        super().__init__(
            f"symbol is not unitary: max |U U* - I| = {self.max_deviation:.3e} "
            f"at k = {self.worst_k}"
        )


class ShapeMismatchError(ValueError):
    """Dimension or coin size of two objects disagree."""


class AliasingError(ValueError):
    """A lattice state does not fit in one period of a torus grid."""

    def __init__(self, extent, points_per_axis):
        self.required_N = int(max(extent))
        super().__init__(
            f"state support extent {tuple(int(e) for e in extent)} does not fit "
            f"in a grid with N={points_per_axis}; need N >= {self.required_N}"
        )


class MonodromyError(RuntimeError):
    """Eigenvalue continuation could not be made unambiguous."""

    def __init__(self, s_lo, s_hi, steps):
        self.interval = (float(s_lo), float(s_hi))
        super().__init__(
            f"ambiguous eigenvalue matching on s in [{s_lo:.6g}, {s_hi:.6g}] "
            f"even with {steps} steps"
        )


class ConfigError(ValueError):
    """Invalid run configuration."""
