"""Exception hierarchy shared by every parskit module."""


class ParsError(Exception):
    """Base class for all parskit errors."""


class ParseError(ParsError):
    """A system, certificate or mapping document is malformed."""


class ValidationError(ParsError):
    def __init__(self, report):
        self.report = report
        codes = ", ".join(sorted({i.code for i in report.errors}))
        super().__init__(f"system failed validation: {codes}")


class UnknownState(ParsError, KeyError):
    def __str__(self):
        return f"unknown state {self.args[0]!r}"


class NotAPath(ParsError):
    pass


class NotProbabilistic(ParsError):
    """A probabilistic analysis was requested on a plain ARS."""


class TargetNotNormalForm(ParsError):
    EXPLANATION = (
        "reaching probabilities are only defined for normal-form targets; "
        "summing path probabilities into a reducible state can exceed 1 "
        "(e.g. 0->1 with a self-loop on 1 gives 1 + 1 + 1 + ...)"
    )

    def __init__(self, source, target):
        self.source = source
        self.target = target
        super().__init__(f"target {target!r} is reducible: {self.EXPLANATION}")


class TargetUnreachable(ParsError):
    def __init__(self, source, target):
        self.source = source
        self.target = target
        super().__init__(f"normal form {target!r} is not reachable from {source!r}")


class TailBoundInvalid(ParsError, ValueError):
    pass


class FrontierPresent(ParsError):
    """An analysis needing a complete system got a window with open frontier."""

    def __init__(self, frontier):
        self.frontier = frozenset(frontier)
        shown = ", ".join(sorted(self.frontier)[:5])
        super().__init__(f"explored system has unexpanded frontier states: {shown}")


class MissingValuation(ParsError, KeyError):
    def __str__(self):
        return f"certificate has no valuation for state {self.args[0]!r}"


class NegativeValuation(ParsError, ValueError):
    pass


class NonPositiveEpsilon(ParsError, ValueError):
    pass


class EmptyReport(ParsError, ValueError):
    pass


class PartialMapping(ParsError):
    def __init__(self, missing):
        self.missing = tuple(sorted(missing))
        super().__init__(f"mapping undefined on: {', '.join(self.missing)}")


class UnknownEntry(ParsError, KeyError):
    def __str__(self):
        return f"no corpus entry named {self.args[0]!r}"


class SingularSystem(ParsError, ArithmeticError):
    pass
