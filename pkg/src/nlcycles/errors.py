"""Exception hierarchy; each class knows its CLI exit status."""


class NLError(Exception):
    exit_code = 3
    module = "nlcycles"

    def __init__(self, message: str = "", module: str | None = None):
        super().__init__(message)
        if module is not None:
            self.module = module

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_json(self) -> dict:
        return {"code": self.code, "message": str(self), "module": self.module}


class BadInput(NLError, ValueError):
    exit_code = 2


class ComputationError(NLError, ArithmeticError):
    exit_code = 3


class PreconditionError(NLError):
    exit_code = 4
