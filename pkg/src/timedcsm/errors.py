"""Exception types shared across the package."""


class TcsmError(Exception):
    """Base class for every error raised by timedcsm."""


class AtomCapExceeded(TcsmError):
    pass


class OutSetNotInAlphabet(TcsmError):
    pass


class UnknownState(TcsmError):
    pass


class UnknownRState(TcsmError):
    pass


class UnknownClock(TcsmError):
    pass


class NegativeDelta(TcsmError):
    pass


class ConstantExceedsBound(TcsmError):
    pass


class OverlappingOutputs(TcsmError):
    def __init__(self, signal, first, second):
        super().__init__(
            f"output signal {signal!r} is generated by both {first!r} and {second!r}"
        )
        self.signal = signal
        self.automata = (first, second)


class OverlappingClocks(TcsmError):
    def __init__(self, clock, first, second):
        super().__init__(f"clock {clock!r} is declared by both {first!r} and {second!r}")
        self.clock = clock
        self.automata = (first, second)


class RegionBudgetExceeded(TcsmError):
    def __init__(self, budget):
        super().__init__(f"region state budget of {budget} exceeded")
        self.budget = budget


class IncomparableAlphabets(TcsmError):
    pass


class UnknownErrorState(TcsmError):
    pass


class NonExternalSignal(TcsmError):
    pass


class ModelError(TcsmError):
    """A positioned diagnostic from the model-file reader."""

    def __init__(self, message, line=None, path=None):
        self.message = message
        self.line = line
        self.path = path
        super().__init__(self.render())

    def render(self):
        where = self.path or "<input>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        return f"{where}: {self.message}"
