import dataclasses

from typing import Optional


@dataclasses.dataclass(frozen=True)
class Verdict:
    """One checked inequality. ``applicable`` is False when the
    preconditions of the bound do not hold; such a verdict never fails."""
    name: str
    measured: float
    bound: Optional[float]
    passed: bool
    applicable: bool = True

    @classmethod
    def upper(cls, name: str, measured: float, bound: Optional[float],
              tol: float = 0.0) -> 'Verdict':
        if bound is None:
            return cls(name=name, measured=measured, bound=None,
                       passed=True, applicable=False)
        return cls(name=name, measured=measured, bound=bound,
                   passed=measured <= bound + tol)

    @classmethod
    def lower(cls, name: str, measured: float, bound: float,
              tol: float = 0.0) -> 'Verdict':
        return cls(name=name, measured=measured, bound=bound,
                   passed=measured >= bound - tol)

    @property
    def failed(self) -> bool:
        return self.applicable and not self.passed

    def describe(self) -> str:
        if not self.applicable:
            return f'{self.name}: inapplicable (measured {self.measured:.6e})'
        status = 'pass' if self.passed else 'FAIL'
        return f'{self.name}: {status} (measured {self.measured:.6e}, bound {self.bound:.6e})'
