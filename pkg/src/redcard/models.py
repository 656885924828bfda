"""Hamiltonians for the 1D spin chains used throughout.

Sign conventions (open chain, ``l - 1`` bonds unless ``periodic``):

* ``tfim``:       ``-J sum X_i X_{i+1} + g sum Z_i``
* ``tfxy``:       ``-Jx sum X_i X_{i+1} - Jy sum Y_i Y_{i+1} + g sum Z_i``
* ``xy``:         ``Jx sum X_i X_{i+1} + Jy sum Y_i Y_{i+1}``
* ``heisenberg``: ``Jx sum XX + Jy sum YY + Jz sum ZZ``

Unset ``Jx/Jy/Jz`` fall back to ``J``. Periodic chains are experimental: the
algebraic structure of the open chain is what the decomposition relies on.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

from redcard.pauli import PauliString, PauliSum

FAMILIES = ("tfim", "tfxy", "xy", "heisenberg")


@dataclass(frozen=True)
class ModelSpec:
    family: str
    sites: int
    J: float = 1.0
    g: float = 0.5
    Jx: float | None = None
    Jy: float | None = None
    Jz: float | None = None
    periodic: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}; choose from {FAMILIES}")
        if self.sites < 2:
            raise ValueError("a chain needs at least 2 sites")

    def couplings(self) -> tuple[float, float, float]:
        pick = lambda v: self.J if v is None else v  # noqa: E731
        return pick(self.Jx), pick(self.Jy), pick(self.Jz)

    def to_dict(self) -> dict:
        return asdict(self)


def _bond(n: int, i: int, j: int, a: str, b: str) -> PauliString:
    chars = ["I"] * n
    chars[i], chars[j] = a, b
    return PauliString.from_label("".join(chars))


def _site(n: int, i: int, a: str) -> PauliString:
    chars = ["I"] * n
    chars[i] = a
    return PauliString.from_label("".join(chars))


def build(spec: ModelSpec) -> PauliSum:
    """Pauli-sum Hamiltonian for ``spec``; see the module docstring for signs."""
    n = spec.sites
    bonds = [(i, i + 1) for i in range(n - 1)]
    if spec.periodic:
        warnings.warn("periodic boundary is experimental", stacklevel=2)
        if n > 2:
            bonds.append((n - 1, 0))
    jx, jy, jz = spec.couplings()
    terms: list[tuple[PauliString, float]] = []
    fam = spec.family
    if fam == "tfim":
        terms += [(_bond(n, i, j, "X", "X"), -spec.J) for i, j in bonds]
        terms += [(_site(n, i, "Z"), spec.g) for i in range(n)]
    elif fam == "tfxy":
        terms += [(_bond(n, i, j, "X", "X"), -jx) for i, j in bonds]
        terms += [(_bond(n, i, j, "Y", "Y"), -jy) for i, j in bonds]
        terms += [(_site(n, i, "Z"), spec.g) for i in range(n)]
    elif fam == "xy":
        terms += [(_bond(n, i, j, "X", "X"), jx) for i, j in bonds]
        terms += [(_bond(n, i, j, "Y", "Y"), jy) for i, j in bonds]
    else:
        for a, c in (("X", jx), ("Y", jy), ("Z", jz)):
            terms += [(_bond(n, i, j, a, a), c) for i, j in bonds]
    return PauliSum(terms, n)


def tfim(sites: int, J: float = 1.0, g: float = 0.5) -> PauliSum:
    return build(ModelSpec("tfim", sites, J=J, g=g))


def tfxy(sites: int, Jx: float = 1.0, Jy: float = 1.0, g: float = 0.5) -> PauliSum:
    return build(ModelSpec("tfxy", sites, Jx=Jx, Jy=Jy, g=g))


def xy(sites: int, Jx: float = 1.0, Jy: float = 1.0) -> PauliSum:
    return build(ModelSpec("xy", sites, Jx=Jx, Jy=Jy))


def heisenberg(sites: int, Jx: float = 1.0, Jy: float = 1.0, Jz: float = 1.0) -> PauliSum:
    return build(ModelSpec("heisenberg", sites, Jx=Jx, Jy=Jy, Jz=Jz))
