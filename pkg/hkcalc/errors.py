class HKError(Exception):
    """Base class of every error raised by hkcalc"""
    pass


class InputError(HKError):
    """Handler of this exception should log the diagnostic and exit with exit_code 1"""
    pass


class PolynomialSyntaxError(InputError):
    def __init__(self, text: str, pos: int, reason: str):
        self.text = text
        self.pos = pos
        self.reason = reason
        super().__init__(f"{reason} at position {pos}: {text[:pos]!r} <here> {text[pos:]!r}")


class TrinomialError(InputError):
    pass


class TermCountError(TrinomialError):
    pass


class ConstantTermError(TrinomialError):
    pass


class NonCoprimeTermsError(TrinomialError):
    pass


class ZeroCoefficientError(TrinomialError):
    pass


class BudgetError(HKError):
    """Handler of this exception should log the diagnostic and exit with exit_code 2"""

    def __init__(self, what: str, required: int, budget: int, unit: str = "q^m"):
        self.what = what
        self.required = required
        self.budget = budget
        self.unit = unit
        if unit == "q^m":
            message = f"{what} needs q^m={required} but the budget is {budget}"
        else:
            message = f"{what} needs {required} {unit} but only {budget} {unit} are available"
        super().__init__(message)


class ContractError(HKError, ValueError):
    """Caller broke a documented precondition"""
    pass
