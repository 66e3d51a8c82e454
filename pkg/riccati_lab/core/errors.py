"""Exception hierarchy.

Every failure the library reports carries a human readable ``detail`` and
the process exit code the command line maps it to (2 = usage/config,
1 = computation or verification failure).
"""


class LabError(Exception):
    exit_code = 2

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class InputError(LabError, ValueError):
    pass


class HorizonMismatch(InputError):
    pass


class ModelError(LabError):
    pass


class SolverError(LabError):
    exit_code = 1


class ConvergenceError(SolverError):
    pass


class NoSingularComponent(LabError):
    exit_code = 1

    def __init__(self, detail: str = "no singular component"):
        super().__init__(detail)


class CandidateOutsideClosedLoop(LabError):
    exit_code = 1

    def __init__(
        self, detail: str = "candidate outside admissible closed-loop set"
    ):
        super().__init__(detail)


class PrecheckFailed(LabError):
    exit_code = 1
