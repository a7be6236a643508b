"""Exception hierarchy shared by all modules."""


class LudersError(ValueError):
    """Base class for every validation or precondition failure."""


class NotHermitian(LudersError):
    def __init__(self, violation, tol=None):
        self.violation = float(violation)
        msg = f"operator is not hermitian: ||A - A^dag|| = {self.violation:.3e}"
        if tol is not None:
            msg += f" > {tol:.1e}"
        super().__init__(msg)


class NotPositive(LudersError):
    def __init__(self, min_eigenvalue, tol=None):
        self.min_eigenvalue = float(min_eigenvalue)
        msg = f"operator is not positive: min eigenvalue {self.min_eigenvalue:.3e}"
        if tol is not None:
            msg += f" < -{tol:.1e}"
        super().__init__(msg)


class SpectrumOutOfRange(LudersError):
    def __init__(self, min_eigenvalue, max_eigenvalue):
        self.min_eigenvalue = float(min_eigenvalue)
        self.max_eigenvalue = float(max_eigenvalue)
        super().__init__(
            "effect spectrum leaves [0, 1]: "
            f"min {self.min_eigenvalue:.6g}, max {self.max_eigenvalue:.6g}"
        )


class DimMismatch(LudersError):
    pass


class Incomplete(LudersError):
    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(f"effects do not sum to identity: ||sum E_i - I|| = {self.residual:.3e}")


class NotProjective(LudersError):
    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(f"family is not projective: residual {self.residual:.3e}")


class NotADensity(LudersError):
    pass


class IndexOutOfRange(LudersError, IndexError):
    pass


class ZeroOperator(LudersError):
    """Raised by a peeling step once the remainder has vanished."""


class HypothesisViolated(LudersError):
    def __init__(self, d2a_norm, tol):
        self.d2a_norm = float(d2a_norm)
        super().__init__(
            f"lemma hypothesis d^2 a = 0 fails: ||d^2 a|| = {self.d2a_norm:.3e} > {tol:.1e}"
        )


class SingularNormalizer(LudersError):
    pass


class OutOfRange(LudersError):
    pass
