"""k-local Pauli target Hamiltonians: parsing, rendering and commutation."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

LETTERS = ("X", "Y", "Z")

_FACTOR_RE = re.compile(r"([XYZ])(\d+)$")


class TargetSyntaxError(ValueError):
    """Malformed target Hamiltonian text; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class PauliTerm:
    """A weighted Pauli string ``coefficient * prod_q sigma_q``.

    ``factors`` is stored as a tuple of ``(qubit, letter)`` pairs sorted by
    qubit index; identities are never stored.
    """

    coefficient: float
    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        coeff = float(self.coefficient)
        if not math.isfinite(coeff) or coeff == 0.0:
            raise ValueError(f"coefficient must be finite and nonzero, got {self.coefficient!r}")
        pairs = sorted((int(q), str(p)) for q, p in self.factors)
        seen = set()
        for q, p in pairs:
            if q < 0:
                raise ValueError(f"negative qubit index {q}")
            if p not in LETTERS:
                raise ValueError(f"invalid Pauli letter {p!r}")
            if q in seen:
                raise ValueError(f"duplicate qubit {q} in term")
            seen.add(q)
        if not pairs:
            raise ValueError("a term needs at least one non-identity factor")
        object.__setattr__(self, "coefficient", coeff)
        object.__setattr__(self, "factors", tuple(pairs))

    @classmethod
    def from_mapping(cls, coefficient: float, factors: Mapping[int, str]) -> "PauliTerm":
        return cls(coefficient, tuple(factors.items()))

    @property
    def locality(self) -> int:
        return len(self.factors)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    def letter(self, qubit: int) -> str:
        """Pauli letter on ``qubit``, ``"I"`` when the term does not act there."""
        for q, p in self.factors:
            if q == qubit:
                return p
        return "I"

    def label(self) -> str:
        return " ".join(f"{p}{q}" for q, p in self.factors)


def terms_commute(a: PauliTerm, b: PauliTerm) -> bool:
    """True iff the Pauli strings of ``a`` and ``b`` commute.

    Two strings commute when the number of shared qubits carrying different
    letters is even.
    """
    mine = dict(a.factors)
    clashes = sum(1 for q, p in b.factors if q in mine and mine[q] != p)
    return clashes % 2 == 0


@dataclass(frozen=True)
class TargetHamiltonian:
    """Sum of uniformly k-local Pauli terms acting on ``n_sys`` system qubits."""

    terms: tuple[PauliTerm, ...]
    n_sys: int = field(default=-1)

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("target Hamiltonian needs at least one term")
        localities = {t.locality for t in terms}
        if len(localities) != 1:
            raise ValueError(
                f"mixed localities {sorted(localities)}; gadgetize each locality group separately"
            )
        k = localities.pop()
        if k < 2:
            raise ValueError("locality k must be at least 2")
        needed = 1 + max(q for t in terms for q in t.qubits)
        n_sys = needed if self.n_sys < 0 else int(self.n_sys)
        if n_sys < needed:
            raise ValueError(f"n_sys={n_sys} too small for qubit index {needed - 1}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "n_sys", n_sys)

    @property
    def k(self) -> int:
        return self.terms[0].locality

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms])

    def pairwise_commuting(self) -> bool:
        return all(
            terms_commute(a, b) for i, a in enumerate(self.terms) for b in self.terms[i + 1:]
        )

    def compacted(self) -> "TargetHamiltonian":
        """Relabel the used qubits to ``0..n-1`` preserving their order."""
        used = sorted({q for t in self.terms for q in t.qubits})
        relabel = {q: i for i, q in enumerate(used)}
        terms = tuple(
            PauliTerm(t.coefficient, tuple((relabel[q], p) for q, p in t.factors))
            for t in self.terms
        )
        return TargetHamiltonian(terms, n_sys=len(used))

    def with_coefficient(self, index: int, value: float) -> "TargetHamiltonian":
        terms = list(self.terms)
        terms[index] = PauliTerm(value, terms[index].factors)
        return TargetHamiltonian(tuple(terms), n_sys=self.n_sys)

    def render(self) -> str:
        return "".join(f"{t.coefficient!r} {t.label()}\n" for t in self.terms)


def parse_target(text: str, compact: bool = False, n_sys: int | None = None) -> TargetHamiltonian:
    """Parse the line format ``<coeff> <LETTER><index> ...``.

    ``#`` starts a comment and blank lines are skipped. With ``compact`` the
    used qubit indices are relabelled to ``0..n-1``, which is how 1-based
    labels such as ``X1 X2 X3`` are brought down to three system qubits.

    Raises:
        TargetSyntaxError: malformed token, duplicate qubit or zero coefficient.
        ValueError: mixed localities or an empty document.
    """
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]
        if not tokens:
            continue
        col, head = tokens[0]
        try:
            coeff = float(head)
        except ValueError:
            raise TargetSyntaxError(f"expected a coefficient, got {head!r}", lineno, col) from None
        if not math.isfinite(coeff):
            raise TargetSyntaxError("coefficient must be finite", lineno, col)
        if coeff == 0.0:
            raise TargetSyntaxError("zero coefficient", lineno, col)
        factors: dict[int, str] = {}
        for col, tok in tokens[1:]:
            match = _FACTOR_RE.match(tok)
            if match is None:
                raise TargetSyntaxError(f"expected LETTERindex, got {tok!r}", lineno, col)
            qubit = int(match.group(2))
            if qubit in factors:
                raise TargetSyntaxError(f"duplicate qubit {qubit}", lineno, col)
            factors[qubit] = match.group(1)
        if not factors:
            raise TargetSyntaxError("term has no Pauli factors", lineno, col + len(head))
        terms.append(PauliTerm.from_mapping(coeff, factors))
    if not terms:
        raise ValueError("no terms found")
    target = TargetHamiltonian(tuple(terms), n_sys=-1 if n_sys is None else n_sys)
    return target.compacted() if compact else target


def read_target(path, compact: bool = False) -> TargetHamiltonian:
    with open(path, encoding="utf-8") as fh:
        return parse_target(fh.read(), compact=compact)


def render_target(target: TargetHamiltonian) -> str:
    return target.render()


def target_from_terms(items: Iterable[tuple[float, str]], compact: bool = False) -> TargetHamiltonian:
    """Convenience constructor: ``[(0.1, "X1 X2 X3"), ...]``."""
    return parse_target("\n".join(f"{c!r} {s}" for c, s in items), compact=compact)
