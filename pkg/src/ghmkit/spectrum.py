"""Classification of periodic-point multiplier tuples.

Every flag is a direct modulus inequality on the multipliers (the eigenvalues
of the derivative of the return map at a hyperbolic periodic point): unstable
index, dissipativeness, sectional dissipativeness, the complex-leading-pair
saddle condition |lam^2 gamma| < 1 < |lam gamma|, and the three-dimensional
Case A / Case B split for dissipative but non-sectional-dissipative saddles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .errors import ConjugacyViolationError, NonHyperbolicError, OutOfRangeError

DEFAULT_TOL = 1e-9


class TatjerCase(enum.Enum):
    NOT_APPLICABLE = "NotApplicable"
    CASE_A = "CaseA"
    CASE_B = "CaseB"


@dataclass(frozen=True)
class MultiplierSet:
    """Multipliers of a periodic point; ``period`` is informational only."""

    values: tuple[complex, ...]
    period: int = 1

    def __post_init__(self) -> None:
        if len(self.values) == 0:
            raise ValueError("multiplier list must be non-empty")
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        for v in self.values:
            if not (abs(v.real) < float("inf") and abs(v.imag) < float("inf")):
                raise ValueError("multipliers must be finite")
        if self.period < 1:
            raise ValueError("period must be a positive integer")


@dataclass(frozen=True)
class SpectrumClass:
    """Result of :func:`classify`."""

    unstable_index: int
    dissipative: bool
    sectionally_dissipative: bool
    satisfies_eq1: bool
    tatjer_case: TatjerCase
    leading_complex: bool

    def to_dict(self) -> dict:
        return {
            "unstable_index": self.unstable_index,
            "dissipative": self.dissipative,
            "sectionally_dissipative": self.sectionally_dissipative,
            "satisfies_eq1": self.satisfies_eq1,
            "tatjer_case": self.tatjer_case.value,
            "leading_complex": self.leading_complex,
        }


def _check_conjugate_pairing(values: Sequence[complex], tol: float) -> None:
    # Values with non-negligible imaginary part must pair up with a conjugate
    # partner, since they come from a real matrix.
    pending = [v for v in values if abs(v.imag) > tol * max(1.0, abs(v))]
    while pending:
        v = pending.pop()
        scale = max(1.0, abs(v))
        for i, w in enumerate(pending):
            if abs(w - v.conjugate()) <= tol * scale:
                pending.pop(i)
                break
        else:
            raise ConjugacyViolationError(
                f"multiplier {v} has no complex-conjugate partner"
            )


def _leading_contracting_pair(values: Sequence[complex], tol: float):
    """Return (lam_modulus, group) for the largest-modulus contracting block.

    The group collects contracting multipliers whose moduli agree with the
    largest contracting modulus within tol.  Empty when nothing contracts.
    """
    contracting = [v for v in values if abs(v) < 1.0]
    if not contracting:
        return None, []
    lam = max(abs(v) for v in contracting)
    group = [v for v in contracting if abs(abs(v) - lam) <= tol]
    return lam, group


def _is_nonreal_conjugate_pair(group: Sequence[complex], tol: float) -> bool:
    if len(group) != 2:
        return False
    a, b = group
    if abs(a.imag) <= tol * max(1.0, abs(a)):
        return False  # argument 0 or pi within tolerance
    return abs(a - b.conjugate()) <= tol * max(1.0, abs(a))


def _tatjer_case(values: Sequence[complex], tol: float) -> TatjerCase:
    # Three-dimensional setting only.
    if len(values) != 3:
        return TatjerCase.NOT_APPLICABLE
    mods = sorted(abs(v) for v in values)
    m_s, m_c, m_u = mods
    if not (m_s < m_c < m_u):
        return TatjerCase.NOT_APPLICABLE
    if not (m_s < 1.0 < m_u):
        return TatjerCase.NOT_APPLICABLE
    if not m_s * m_c * m_u < 1.0:
        return TatjerCase.NOT_APPLICABLE
    if m_c < 1.0:
        return TatjerCase.CASE_A if m_c * m_u > 1.0 else TatjerCase.NOT_APPLICABLE
    return TatjerCase.CASE_B


def classify(
    mults: MultiplierSet | Sequence[complex], tol: float = DEFAULT_TOL
) -> SpectrumClass:
    """Classify a multiplier tuple against every spectral condition.

    Parameters
    ----------
    mults :
        A :class:`MultiplierSet` or a plain sequence of complex multipliers.
    tol :
        Hyperbolicity margin and conjugate-pairing tolerance.

    Raises
    ------
    NonHyperbolicError
        If some modulus lies within ``tol`` of 1.
    ConjugacyViolationError
        If the complex entries cannot be grouped into conjugate pairs.
    """
    if not isinstance(mults, MultiplierSet):
        mults = MultiplierSet(tuple(mults))
    values = mults.values

    for v in values:
        if abs(abs(v) - 1.0) <= tol:
            raise NonHyperbolicError(f"multiplier {v} has modulus within {tol} of 1")
    _check_conjugate_pairing(values, tol)

    mods = [abs(v) for v in values]
    unstable_index = sum(1 for m in mods if m > 1.0)

    prod = 1.0
    for m in mods:
        prod *= m
    dissipative = prod < 1.0

    sectionally = all(
        mods[i] * mods[j] < 1.0
        for i in range(len(mods))
        for j in range(i + 1, len(mods))
    )

    lam, group = _leading_contracting_pair(values, tol)
    leading_complex = _is_nonreal_conjugate_pair(group, tol)

    satisfies_eq1 = False
    if unstable_index == 1 and leading_complex and lam is not None:
        gamma = max(mods)
        others_below = all(
            abs(v) < lam - tol for v in values if abs(v) < 1.0 and v not in group
        )
        if others_below and lam * lam * gamma < 1.0 < lam * gamma:
            satisfies_eq1 = True

    return SpectrumClass(
        unstable_index=unstable_index,
        dissipative=dissipative,
        sectionally_dissipative=sectionally,
        satisfies_eq1=satisfies_eq1,
        tatjer_case=_tatjer_case(values, tol),
        leading_complex=leading_complex,
    )


def tangency_codimension(span_dim: int) -> int:
    """Codimension of the extra tangency condition in ambient dimension 3.

    ``span_dim`` is the dimension of the span of the unstable tangent space
    and the strong-unstable leaf direction at the tangency point.
    """
    if not isinstance(span_dim, int) or isinstance(span_dim, bool):
        raise OutOfRangeError("span_dim must be an integer")
    if not 1 <= span_dim <= 3:
        raise OutOfRangeError(f"span_dim must be in [1, 3], got {span_dim}")
    return 3 - span_dim
