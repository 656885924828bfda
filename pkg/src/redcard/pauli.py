"""Signed Pauli strings in binary symplectic form and real Pauli sums.

Qubit ``k`` (1-indexed in text form) is stored in bit ``k - 1`` of the
masks. Per qubit, ``(x, z)`` encodes ``I, X, Z, Y`` as ``(0,0), (1,0),
(0,1), (1,1)`` and the operator is ``i**popcount(x & z) * X**x Z**z`` so that
a bare string with ``phase == 0`` is Hermitian.
"""

from __future__ import annotations

import json
import math
import re
from typing import Iterable, Iterator, Mapping

from redcard.errors import DimensionError, HermiticityError

PRUNE_TOL = 1e-12

_CHARS = "IXZY"  # index = x + 2 * z
_PHASE_TEXT = {0: "", 1: "i", 2: "-", 3: "-i"}
_SPARSE_RE = re.compile(r"([IXYZ])(\d+)")


def _popcount(v: int) -> int:
    return bin(v).count("1")


class PauliString:
    """An n-qubit Pauli operator ``i**phase * P`` with ``P`` Hermitian.

    Instances are immutable and hashable. Canonical basis elements carry
    ``phase == 0``; products may carry any phase mod 4.
    """

    __slots__ = ("x_mask", "z_mask", "n_qubits", "phase")

    def __init__(self, x_mask: int, z_mask: int, n_qubits: int, phase: int = 0):
        if n_qubits < 1:
            raise DimensionError(f"n_qubits must be positive, got {n_qubits}")
        full = (1 << n_qubits) - 1
        if x_mask & ~full or z_mask & ~full or x_mask < 0 or z_mask < 0:
            raise DimensionError(f"masks exceed {n_qubits} qubits")
        object.__setattr__(self, "x_mask", x_mask)
        object.__setattr__(self, "z_mask", z_mask)
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "phase", phase % 4)

    def __setattr__(self, name, value):
        raise AttributeError("PauliString is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(0, 0, n_qubits)

    @classmethod
    def from_label(cls, label: str, n_qubits: int | None = None) -> PauliString:
        """Parse ``"XZY"`` (dense) or ``"X1 Z2 Y3"`` (sparse, 1-indexed).

        Dense labels may carry a phase prefix from ``{"", "i", "-", "-i", "+"}``.
        Sparse labels need ``n_qubits`` unless the largest index is meant to
        set the width.
        """
        text = label.strip()
        phase = 0
        for prefix, p in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if text.startswith(prefix) and (len(text) == len(prefix) or text[len(prefix)] in "IXYZ "):
                phase = p
                text = text[len(prefix):].strip()
                break
        if any(ch.isdigit() for ch in text):
            sites = _SPARSE_RE.findall(text)
            if "".join(f"{c}{i}" for c, i in sites) != text.replace(" ", ""):
                raise ValueError(f"cannot parse Pauli label {label!r}")
            width = n_qubits or max(int(i) for _, i in sites)
            x = z = 0
            for c, i in sites:
                q = int(i) - 1
                if q < 0 or q >= width:
                    raise DimensionError(f"qubit index {i} out of range for n={width}")
                if (x | z) >> q & 1:
                    raise ValueError(f"qubit {i} given twice in {label!r}")
                x, z = _set_site(x, z, q, c)
            return cls(x, z, width, phase)
        if not text:
            if n_qubits is None:
                raise ValueError("empty label needs n_qubits")
            return cls(0, 0, n_qubits, phase)
        if n_qubits is not None and n_qubits != len(text):
            raise DimensionError(f"label {label!r} has {len(text)} sites, expected {n_qubits}")
        x = z = 0
        for q, c in enumerate(text):
            if c not in _CHARS:
                raise ValueError(f"unknown Pauli character {c!r}")
            x, z = _set_site(x, z, q, c)
        return cls(x, z, len(text), phase)

    # -- views --------------------------------------------------------------

    def site(self, q: int) -> str:
        """Pauli letter on 0-indexed qubit ``q``."""
        return _CHARS[(self.x_mask >> q & 1) + 2 * (self.z_mask >> q & 1)]

    @property
    def label(self) -> str:
        """Dense label without phase, qubit 1 first."""
        return "".join(self.site(q) for q in range(self.n_qubits))

    @property
    def sparse_label(self) -> str:
        parts = [f"{self.site(q)}{q + 1}" for q in self.support]
        return " ".join(parts) if parts else "I"

    @property
    def support(self) -> list[int]:
        m = self.x_mask | self.z_mask
        return [q for q in range(self.n_qubits) if m >> q & 1]

    @property
    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def canonical(self) -> PauliString:
        """The same string with the phase dropped."""
        if self.phase == 0:
            return self
        return PauliString(self.x_mask, self.z_mask, self.n_qubits)

    def sort_key(self) -> tuple[int, int]:
        return (self.x_mask, self.z_mask)

    # -- algebra -----------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, PauliString):
            return multiply(self, other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, PauliString):
            return NotImplemented
        return (self.x_mask, self.z_mask, self.n_qubits, self.phase) == (
            other.x_mask, other.z_mask, other.n_qubits, other.phase)

    def __lt__(self, other: PauliString) -> bool:
        return self.sort_key() < other.sort_key()

    def __hash__(self):
        return hash((self.x_mask, self.z_mask, self.n_qubits, self.phase))

    def __repr__(self):
        return f"PauliString({_PHASE_TEXT[self.phase]}{self.label})"

    def __str__(self):
        return f"{_PHASE_TEXT[self.phase]}{self.label}"


def _set_site(x: int, z: int, q: int, c: str) -> tuple[int, int]:
    code = _CHARS.index(c)
    return x | (code & 1) << q, z | (code >> 1) << q


def _check_dims(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit-count mismatch: {a.n_qubits} vs {b.n_qubits}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Operator product ``a @ b`` with its phase tracked mod 4."""
    _check_dims(a, b)
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    # X^xa Z^za X^xb Z^zb = (-1)^{|za & xb|} X^x Z^z, then re-absorb the Y factors
    phase = (a.phase + b.phase
             + _popcount(a.x_mask & a.z_mask) + _popcount(b.x_mask & b.z_mask)
             - _popcount(x & z) + 2 * _popcount(a.z_mask & b.x_mask))
    return PauliString(x, z, a.n_qubits, phase)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_dims(a, b)
    return (_popcount(a.x_mask & b.z_mask) + _popcount(a.z_mask & b.x_mask)) % 2 == 0


def commutator_basis(a: PauliString, b: PauliString) -> PauliString | None:
    """Canonical string proportional to ``[a, b]``, or None if they commute."""
    if commutes(a, b):
        return None
    return PauliString(a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask, a.n_qubits)


def y_parity(a: PauliString) -> int:
    """0 for an even number of Y sites, 1 for odd."""
    return _popcount(a.x_mask & a.z_mask) % 2


def _as_string(key, n_qubits: int | None) -> PauliString:
    if isinstance(key, PauliString):
        return key
    return PauliString.from_label(key, n_qubits)


class PauliSum:
    """Real linear combination of canonical Pauli strings (a Hermitian operator).

    Terms with ``|coeff| < PRUNE_TOL`` are dropped on construction. Keys may be
    given as :class:`PauliString` or as text labels.
    """

    __slots__ = ("_terms", "n_qubits")

    def __init__(self, terms: Mapping | Iterable = (), n_qubits: int | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[PauliString, float] = {}
        width = n_qubits
        for key, coeff in items:
            p = _as_string(key, width)
            if width is None:
                width = p.n_qubits
            elif p.n_qubits != width:
                raise DimensionError(f"term {p} does not act on {width} qubits")
            c = complex(coeff) * (1j ** p.phase)
            if abs(c.imag) > PRUNE_TOL:
                raise HermiticityError(f"non-real coefficient {c} on {p.label}")
            p = p.canonical()
            acc[p] = acc.get(p, 0.0) + c.real
        if width is None:
            raise ValueError("empty PauliSum needs n_qubits")
        self.n_qubits = width
        self._terms = {p: c for p, c in acc.items() if abs(c) >= PRUNE_TOL}

    @classmethod
    def from_string(cls, p: PauliString, coeff: float = 1.0) -> PauliSum:
        return cls({p: coeff}, p.n_qubits)

    # -- mapping-ish access --------------------------------------------------

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(sorted(self._terms))

    def __contains__(self, p) -> bool:
        return p in self._terms

    def items(self) -> list[tuple[PauliString, float]]:
        return [(p, self._terms[p]) for p in sorted(self._terms)]

    def coeff(self, p: PauliString) -> float:
        return self._terms.get(p.canonical(), 0.0)

    @property
    def strings(self) -> list[PauliString]:
        return sorted(self._terms)

    # -- arithmetic -----------------------------------------------------------

    def _combine(self, other: PauliSum, sign: float) -> PauliSum:
        if other.n_qubits != self.n_qubits:
            raise DimensionError("qubit-count mismatch")
        acc = dict(self._terms)
        for p, c in other._terms.items():
            acc[p] = acc.get(p, 0.0) + sign * c
        return PauliSum(acc, self.n_qubits)

    def __add__(self, other):
        if isinstance(other, PauliSum):
            return self._combine(other, 1.0)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, PauliSum):
            return self._combine(other, -1.0)
        return NotImplemented

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float)):
            return PauliSum({p: scalar * c for p, c in self._terms.items()}, self.n_qubits)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def isclose(self, other: PauliSum, atol: float = 1e-10) -> bool:
        return (self - other).norm() <= atol

    def norm(self) -> float:
        """Normalized Hilbert-Schmidt norm ``sqrt(Tr(A^2) / 2^n)``."""
        return math.sqrt(sum(c * c for c in self._terms.values()))

    def restrict(self, keep: Iterable[PauliString]) -> PauliSum:
        keep = set(keep)
        return PauliSum({p: c for p, c in self._terms.items() if p in keep}, self.n_qubits)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> list[dict]:
        return [{"string": p.label, "coeff": c} for p, c in self.items()]

    @classmethod
    def from_json(cls, data, n_qubits: int | None = None) -> PauliSum:
        if isinstance(data, str):
            data = json.loads(data)
        return cls([(d["string"], d["coeff"]) for d in data], n_qubits)

    def __repr__(self):
        body = " ".join(f"{c:+.6g}*{p.label}" for p, c in self.items())
        return f"PauliSum({body or '0'}; n={self.n_qubits})"
