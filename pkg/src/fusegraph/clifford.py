"""Single-qubit Clifford labels, stored as conjugation images of X and Z."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from types import MappingProxyType

__all__ = ["Clifford", "CliffordRecord", "GENERATORS", "clifford_group"]

# (a, b) -> (k, c) with a*b = i^k c
_PAULI_MUL = {
    ("X", "Y"): (1, "Z"),
    ("Y", "Z"): (1, "X"),
    ("Z", "X"): (1, "Y"),
    ("Y", "X"): (3, "Z"),
    ("Z", "Y"): (3, "X"),
    ("X", "Z"): (3, "Y"),
}


@dataclass(frozen=True, order=True)
class Clifford:
    """A single-qubit Clifford modulo global phase.

    ``x`` and ``z`` are the signed Paulis ``C X C^dagger`` and
    ``C Z C^dagger``, e.g. ``("+", "Y")``.
    """

    x: tuple[str, str] = ("+", "X")
    z: tuple[str, str] = ("+", "Z")

    def __post_init__(self) -> None:
        for s, p in (self.x, self.z):
            if s not in "+-" or p not in ("X", "Y", "Z"):
                raise ValueError(f"bad signed Pauli {s}{p}")
        if self.x[1] == self.z[1]:
            raise ValueError("images of X and Z must anticommute")

    def image(self, sign: str, pauli: str) -> tuple[str, str]:
        if pauli == "X":
            s, p = self.x
        elif pauli == "Z":
            s, p = self.z
        else:
            # Y = iXZ, so C(Y) = i C(X) C(Z)
            k, p = _PAULI_MUL[(self.x[1], self.z[1])]
            neg = (self.x[0] == "-") ^ (self.z[0] == "-") ^ ((k + 1) % 4 == 2)
            s = "-" if neg else "+"
        if sign == "-":
            s = "+" if s == "-" else "-"
        return s, p

    def then(self, after: Clifford) -> Clifford:
        """The Clifford that applies ``self`` first and ``after`` second."""
        return Clifford(after.image(*self.x), after.image(*self.z))

    @property
    def is_identity(self) -> bool:
        return self == IDENTITY

    def word(self) -> tuple[str, ...]:
        """A shortest generator word (applied left to right) realising this label."""
        return _WORDS[self]

    def __str__(self) -> str:
        return f"X->{''.join(self.x)},Z->{''.join(self.z)}"

    @classmethod
    def parse(cls, text: str) -> Clifford:
        xs, zs = text.split(",")
        xi, zi = xs.split("->")[1], zs.split("->")[1]
        return cls((xi[0], xi[1]), (zi[0], zi[1]))


IDENTITY = Clifford()

GENERATORS: Mapping[str, Clifford] = MappingProxyType(
    {
        "RX": Clifford(("+", "X"), ("-", "Y")),
        "RXdg": Clifford(("+", "X"), ("+", "Y")),
        "RZ": Clifford(("+", "Y"), ("+", "Z")),
        "RZdg": Clifford(("-", "Y"), ("+", "Z")),
        "H": Clifford(("+", "Z"), ("+", "X")),
    }
)


def _enumerate() -> dict[Clifford, tuple[str, ...]]:
    words = {IDENTITY: ()}
    queue = deque([IDENTITY])
    while queue:
        c = queue.popleft()
        for name, g in GENERATORS.items():
            nxt = c.then(g)
            if nxt not in words:
                words[nxt] = words[c] + (name,)
                queue.append(nxt)
    return words


_WORDS = _enumerate()


def clifford_group() -> frozenset[Clifford]:
    """All 24 single-qubit Cliffords reachable from the generators."""
    return frozenset(_WORDS)


class CliffordRecord:
    """Immutable map from vertex id to an accumulated single-qubit Clifford.

    Vertices without an entry carry the identity.
    """

    __slots__ = ("_labels",)

    def __init__(self, labels: Mapping[str, Clifford] | None = None) -> None:
        self._labels = {
            v: c for v, c in (labels or {}).items() if not c.is_identity
        }

    def __getitem__(self, v: str) -> Clifford:
        return self._labels.get(v, IDENTITY)

    def apply(self, v: str, gate: Clifford | str) -> CliffordRecord:
        if isinstance(gate, str):
            gate = GENERATORS[gate]
        labels = dict(self._labels)
        labels[v] = self[v].then(gate)
        return CliffordRecord(labels)

    def apply_lc(self, v: str, neighbours: Iterable[str]) -> CliffordRecord:
        labels = dict(self._labels)
        labels[v] = self[v].then(GENERATORS["RXdg"])
        for u in neighbours:
            labels[u] = self[u].then(GENERATORS["RZ"])
        return CliffordRecord(labels)

    def non_identity(self) -> dict[str, Clifford]:
        return dict(self._labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordRecord):
            return NotImplemented
        return self._labels == other._labels

    def __repr__(self) -> str:
        return f"CliffordRecord({len(self._labels)} non-identity)"
