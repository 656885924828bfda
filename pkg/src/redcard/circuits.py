"""Gate-level circuit IR, fixed-depth evolution circuits and a QASM exporter.

``rot(P, a)`` is ``exp(i * a * P)``, the same convention as an ansatz factor.
Gates are listed in time order; qubits ``0..n-1`` are physical, ``n..`` are
ancillas.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from redcard.errors import ConsistencyError, PreconditionError, UnsupportedAnsatzError
from redcard.pauli import PauliString


@dataclass(frozen=True)
class Gate:
    kind: str  # rot | h | s | sdg | cx | reset | barrier
    qubit: int | None = None
    control: int | None = None
    target: int | None = None
    string: PauliString | None = None
    angle: float | None = None

    def qubits(self) -> tuple[int, ...]:
        if self.kind == "rot":
            return tuple(self.string.support)
        if self.kind == "cx":
            return (self.control, self.target)
        if self.qubit is not None:
            return (self.qubit,)
        return ()


def rot(string: PauliString, angle: float) -> Gate:
    return Gate("rot", string=string.canonical(), angle=float(angle))


def h(q: int) -> Gate:
    return Gate("h", qubit=q)


def s(q: int) -> Gate:
    return Gate("s", qubit=q)


def sdg(q: int) -> Gate:
    return Gate("sdg", qubit=q)


def cx(control: int, target: int) -> Gate:
    return Gate("cx", control=control, target=target)


def reset(q: int) -> Gate:
    return Gate("reset", qubit=q)


BARRIER = Gate("barrier")


@dataclass
class Circuit:
    n_qubits: int
    n_ancillas: int = 0
    gates: list[Gate] = field(default_factory=list)

    def append(self, gate: Gate) -> None:
        total = self.n_qubits + self.n_ancillas
        for q in gate.qubits():
            if not 0 <= q < total:
                raise PreconditionError(f"qubit {q} out of range for {total} qubits")
        if gate.kind == "rot" and gate.string.n_qubits != self.n_qubits:
            raise PreconditionError("rotation string must act on the physical register")
        self.gates.append(gate)

    def extend(self, gates) -> None:
        for g in gates:
            self.append(g)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def cnot_count(self) -> int:
        """CNOTs after lowering each weight-w rotation to a 2(w-1) CNOT ladder."""
        lowered = sum(2 * (g.string.weight - 1) for g in self.gates if g.kind == "rot" and g.string.weight)
        return self.count("cx") + lowered

    def __len__(self):
        return len(self.gates)


# -- evolution circuits -------------------------------------------------------

def _k_blocks(result) -> list[list[tuple[PauliString, float]]]:
    return [list(zip(strings, angles)) for strings, angles in zip(result.fragment_strings, result.angles)]


def _center(result, t: float) -> list[Gate]:
    hset = set(result.h_basis)
    return [rot(p, -t * c) for p, c in result.h.items() if p in hset]


def build_evolution_circuit(result, structure=None, t: float = 0.0, barriers: bool = True,
                            force: bool = False) -> Circuit:
    """``K^1 ... K^B exp(-i t h) K^B^dagger ... K^1^dagger`` as gates.

    The gate list does not depend on ``t``; only the center angles do.
    Unconverged results are refused unless ``force`` is set.
    """
    if structure is not None and [list(f) for f in result.fragment_strings] != [
            list(f) for f in structure.fragments] and result.ansatz == "product":
        raise ConsistencyError("result fragments do not match the Cartan structure")
    if not result.converged and not force:
        raise PreconditionError("result did not converge; pass force=True to emit anyway")
    circ = Circuit(result.n_qubits)
    blocks = _k_blocks(result)
    # time order: rightmost operator first -> K^1^dagger ... K^B^dagger
    for block in blocks:
        if block:
            circ.extend(rot(p, -a) for p, a in block)
            if barriers:
                circ.append(BARRIER)
    circ.extend(_center(result, t))
    if barriers:
        circ.append(BARRIER)
    for block in reversed(blocks):
        if block:
            circ.extend(rot(p, a) for p, a in reversed(block))
            if barriers:
                circ.append(BARRIER)
    return circ


def compressed_tfxy_strings(n: int, r: int) -> list[PauliString]:
    """Ladder factors of fragment ``r`` (1-indexed): doublets D_{j-1,j}, j = n..r+1."""
    out = []
    for j in range(n, r, -1):
        for a, b in (("X", "Y"), ("Y", "X")):
            chars = ["I"] * n
            chars[j - 2], chars[j - 1] = a, b
            out.append(PauliString.from_label("".join(chars)))
    return out


def check_tfxy_structure(structure) -> None:
    """Raise unless k is spanned by the X Z..Z Y / Y Z..Z X strings and b = Z_1..Z_n."""
    n = structure.n_qubits
    expected = set()
    for i in range(n):
        for j in range(i + 1, n):
            for a, b in (("X", "Y"), ("Y", "X")):
                chars = ["I"] * n
                chars[i], chars[j] = a, b
                for q in range(i + 1, j):
                    chars[q] = "Z"
                expected.add(PauliString.from_label("".join(chars)))
    zs = [PauliString.from_label("I" * q + "Z" + "I" * (n - q - 1)) for q in range(n)]
    if set(structure.k_basis) != expected or list(structure.b_basis) != zs:
        raise UnsupportedAnsatzError("compressed ladder needs the TFIM/TFXY Cartan structure "
                                     "with b = (Z_1, ..., Z_n) in site order")


def build_compressed_tfxy_circuit(result, structure, t: float, barriers: bool = True,
                                  force: bool = False) -> Circuit:
    """Evolution circuit made only of nearest-neighbour doublets.

    ``result`` must come from a RedCarD run with ``ansatz="compressed"``; each
    block is then a descending ladder of ``n - r`` doublets.
    """
    check_tfxy_structure(structure)
    n = structure.n_qubits
    if result.ansatz != "compressed":
        raise UnsupportedAnsatzError("result was optimized with the product ansatz; "
                                     "rerun with ansatz='compressed'")
    for r, strings in enumerate(result.fragment_strings, start=1):
        if list(strings) != compressed_tfxy_strings(n, r):
            raise ConsistencyError(f"block {r} is not the ladder D_(j-1,j), j={n}..{r + 1}")
    return build_evolution_circuit(result, None, t, barriers, force)


def doublet_count(circuit: Circuit) -> int:
    """Number of nearest-neighbour XY/YX doublets (pairs of weight-2 rotations)."""
    rots = [g for g in circuit.gates if g.kind == "rot" and g.string.weight == 2]
    return len(rots) // 2


# -- QASM -----------------------------------------------------------------------

_HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def _qname(q: int, n: int) -> str:
    return f"q[{q}]" if q < n else f"a[{q - n}]"


def _lower_rotation(g: Gate, n: int) -> list[str]:
    p, angle = g.string, g.angle
    sup = p.support
    if not sup:
        return [f"// global phase exp(i*{angle!r})"]
    pre, post = [], []
    for q in sup:
        c = p.site(q)
        if c == "X":
            pre.append(f"h {_qname(q, n)};")
            post.append(f"h {_qname(q, n)};")
        elif c == "Y":
            pre += [f"sdg {_qname(q, n)};", f"h {_qname(q, n)};"]
            post += [f"h {_qname(q, n)};", f"s {_qname(q, n)};"]
    ladder = [f"cx {_qname(a, n)},{_qname(b, n)};" for a, b in zip(sup, sup[1:])]
    # exp(i a Z) = rz(-2a)
    core = [f"rz({-2.0 * angle!r}) {_qname(sup[-1], n)};"]
    return pre + ladder + core + ladder[::-1] + post


def export_qasm(circuit: Circuit) -> str:
    """Minimal OpenQASM 2 text (plus ``reset``); rotations lowered to CNOT ladders + rz."""
    n = circuit.n_qubits
    lines = [_HEADER.rstrip("\n")]
    lines.append(f"qreg q[{n}];")
    if circuit.n_ancillas:
        lines.append(f"qreg a[{circuit.n_ancillas}];")
    for g in circuit.gates:
        if g.kind == "rot":
            lines += _lower_rotation(g, n)
        elif g.kind in ("h", "s", "sdg", "reset"):
            lines.append(f"{g.kind} {_qname(g.qubit, n)};")
        elif g.kind == "cx":
            lines.append(f"cx {_qname(g.control, n)},{_qname(g.target, n)};")
        elif g.kind == "barrier":
            regs = "q" + (",a" if circuit.n_ancillas else "")
            lines.append(f"barrier {regs};")
    return "\n".join(lines) + "\n"


_REG_RE = re.compile(r"qreg\s+([qa])\[(\d+)\];")
_REF_RE = re.compile(r"([qa])\[(\d+)\]")


def parse_qasm(text: str) -> Circuit:
    """Parse the dialect written by :func:`export_qasm` back into primitive gates.

    ``rz(phi)`` on qubit q becomes ``rot(Z_q, -phi / 2)``.
    """
    sizes = {"q": 0, "a": 0}
    body = []
    for raw in text.splitlines():
        line = raw.split("//", 1)[0].strip()
        if not line or line.startswith(("OPENQASM", "include")):
            continue
        m = _REG_RE.fullmatch(line)
        if m:
            sizes[m.group(1)] = int(m.group(2))
            continue
        body.append(line)
    n = sizes["q"]
    circ = Circuit(n, sizes["a"])

    def idx(ref: str) -> int:
        reg, i = _REF_RE.fullmatch(ref.strip()).groups()
        return int(i) if reg == "q" else n + int(i)

    for line in body:
        line = line.rstrip(";")
        if line.startswith("barrier"):
            circ.append(BARRIER)
            continue
        m = re.fullmatch(r"rz\((.+)\)\s+(\S+)", line)
        if m:
            q = idx(m.group(2))
            chars = ["I"] * n
            chars[q] = "Z"
            circ.append(rot(PauliString.from_label("".join(chars)), -float(m.group(1)) / 2))
            continue
        op, args = line.split(None, 1)
        if op == "cx":
            c, t = args.split(",")
            circ.append(cx(idx(c), idx(t)))
        elif op in ("h", "s", "sdg", "reset"):
            circ.append(Gate(op, qubit=idx(args)))
        else:
            raise PreconditionError(f"unsupported QASM statement {line!r}")
    return circ
