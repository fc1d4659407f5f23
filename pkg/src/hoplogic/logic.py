"""Propositional definite-clause programs: parsing, generation, semantics."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

# A bipolar spin vector: +1 is true, -1 is false.
NetworkState = tuple[int, ...]

MAX_ENUMERATION_ATOMS = 20

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ProgramError(ValueError):
    """Base class for malformed logic programs."""


class ProgramSyntaxError(ProgramError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateAtomError(ProgramError):
    """An atom appears twice within one clause."""


class HeadlessClauseError(ProgramError):
    """A goal clause (no head) was given; only definite clauses are accepted."""


class EnumerationTooLarge(ProgramError):
    pass


@dataclass(frozen=True)
class Atom:
    name: str
    index: int


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        seen = set()
        for a in (self.head, *self.body):
            if a.index in seen:
                raise DuplicateAtomError(f"atom {a.name!r} repeated in clause")
            seen.add(a.index)

    @property
    def arity(self) -> int:
        return 1 + len(self.body)

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return (self.head, *self.body)

    def violating_assignment(self) -> dict[int, int]:
        """The unique falsifying assignment: head false, every body atom true."""
        out = {a.index: 1 for a in self.body}
        out[self.head.index] = -1
        return out

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head.name}."
        return f"{self.head.name} <- {', '.join(a.name for a in self.body)}."


@dataclass(frozen=True)
class LogicProgram:
    atoms: tuple[Atom, ...]
    clauses: tuple[Clause, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for i, a in enumerate(self.atoms):
            if a.index != i:
                raise ProgramError(f"atom {a.name!r} has index {a.index}, expected {i}")
        if len({a.name for a in self.atoms}) != len(self.atoms):
            raise ProgramError("atom names must be unique")
        for c in self.clauses:
            for a in c.atoms:
                if a.index >= len(self.atoms) or self.atoms[a.index] != a:
                    raise ProgramError(f"clause atom {a.name!r} not in program universe")

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @classmethod
    def from_names(cls, names: Sequence[str], clauses: Iterable[Sequence[str]]) -> "LogicProgram":
        """Build from atom names and clauses given as ``[head, *body]`` name lists."""
        atoms = tuple(Atom(n, i) for i, n in enumerate(names))
        by_name = {a.name: a for a in atoms}
        built = [Clause(by_name[c[0]], tuple(by_name[b] for b in c[1:])) for c in clauses]
        return cls(atoms, tuple(built))

    def __str__(self) -> str:
        return format_program(self)


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>%[^\n]*)|(?P<arrow><-)|(?P<comma>,)"
    r"|(?P<dot>\.)|(?P<atom>[A-Za-z_][A-Za-z0-9_]*)"
)


# A comment of this form declares the atom universe and its index order.
_PRAGMA = "% atoms:"


def _tokenize(text: str):
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ProgramSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        if kind == "comment" and m.group().startswith(_PRAGMA):
            yield "pragma", m.group()[len(_PRAGMA):], line, pos - line_start + 1
        elif kind not in ("ws", "comment"):
            yield kind, m.group(), line, pos - line_start + 1
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    yield "eof", "", line, pos - line_start + 1


def parse_program(text: str, num_atoms: int | None = None) -> LogicProgram:
    """Parse program source into a :class:`LogicProgram`.

    Atoms are indexed in order of first appearance, unless an ``% atoms:``
    comment declares the universe first. ``num_atoms`` optionally pads the
    universe with uninvolved atoms named ``_x<i>``.
    """
    names: dict[str, int] = {}
    raw: list[list[str]] = []
    tokens = _tokenize(text)
    tok = next(tokens)

    def expect(kind):
        nonlocal tok
        if tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ProgramSyntaxError(f"expected {kind}, found {what}", tok[2], tok[3])
        t = tok
        tok = next(tokens)
        return t

    while tok[0] != "eof":
        if tok[0] == "pragma":
            if names or raw:
                raise ProgramSyntaxError("atom declaration must precede clauses", tok[2], tok[3])
            for n in tok[1].split():
                if not _ATOM_RE.fullmatch(n):
                    raise ProgramSyntaxError(f"bad atom name {n!r} in declaration", tok[2], tok[3])
                if n in names:
                    raise ProgramSyntaxError(f"atom {n!r} declared twice", tok[2], tok[3])
                names[n] = len(names)
            tok = next(tokens)
            continue
        if tok[0] == "arrow":
            raise HeadlessClauseError(
                f"line {tok[2]}, column {tok[3]}: clause has no head (goal clauses are not definite)"
            )
        start = tok
        clause = [expect("atom")[1]]
        if tok[0] == "arrow":
            expect("arrow")
            clause.append(expect("atom")[1])
            while tok[0] == "comma":
                expect("comma")
                clause.append(expect("atom")[1])
        expect("dot")
        if len(set(clause)) != len(clause):
            raise DuplicateAtomError(
                f"line {start[2]}, column {start[3]}: duplicate atom in clause"
            )
        for n in clause:
            names.setdefault(n, len(names))
        raw.append(clause)

    atom_names = list(names)
    if num_atoms is not None:
        if num_atoms < len(atom_names):
            raise ProgramError(f"program mentions {len(atom_names)} atoms, more than {num_atoms}")
        taken = set(atom_names)
        i = 0
        while len(atom_names) < num_atoms:
            candidate = f"_x{i}"
            if candidate not in taken:
                atom_names.append(candidate)
            i += 1
    return LogicProgram.from_names(atom_names, raw)


def format_program(p: LogicProgram) -> str:
    """Render program source; ``parse_program`` inverts it exactly."""
    lines = [f"{c}\n" for c in p.clauses]
    order: dict[str, None] = {}
    for c in p.clauses:
        for a in c.atoms:
            order.setdefault(a.name)
    if list(order) != [a.name for a in p.atoms]:
        lines.insert(0, f"{_PRAGMA} {' '.join(a.name for a in p.atoms)}\n")
    return "".join(lines)


# --------------------------------------------------------------------------
# generation


def default_atom_names(n: int) -> list[str]:
    return [f"a{i}" for i in range(n)]


def generate_random_program(
    num_atoms: int, counts: Mapping[int, int], seed=None
) -> LogicProgram:
    """Random definite program with ``counts[k]`` clauses of arity ``k``.

    Clause atoms are drawn without replacement and the head uniformly among
    them. Arities are processed in ascending order so the RNG stream depends
    only on ``(num_atoms, counts, seed)``.
    """
    if num_atoms < 1:
        raise ProgramError("num_atoms must be positive")
    for k, n in counts.items():
        if k < 1:
            raise ProgramError(f"arity must be >= 1, got {k}")
        if n < 0:
            raise ProgramError(f"clause count must be >= 0, got {n}")
        if n and k > num_atoms:
            raise ProgramError(f"arity {k} exceeds universe of {num_atoms} atoms")
    rng = np.random.default_rng(seed)
    names = default_atom_names(num_atoms)
    raw = []
    for k in sorted(counts):
        for _ in range(counts[k]):
            chosen = [int(i) for i in rng.choice(num_atoms, size=k, replace=False)]
            head = chosen.pop(int(rng.integers(k)))
            raw.append([names[head], *(names[i] for i in chosen)])
    return LogicProgram.from_names(names, raw)


# --------------------------------------------------------------------------
# semantics


def is_violated(c: Clause, s: Sequence[int]) -> bool:
    return s[c.head.index] == -1 and all(s[b.index] == 1 for b in c.body)


def count_violations(p: LogicProgram, s: Sequence[int]) -> int:
    if len(s) != p.num_atoms:
        raise ValueError(f"state has {len(s)} spins, program has {p.num_atoms} atoms")
    return sum(is_violated(c, s) for c in p.clauses)


def all_states(n: int):
    """All ``2**n`` bipolar states; the last atom varies fastest."""
    return itertools.product((-1, 1), repeat=n)


def enumerate_models(p: LogicProgram) -> set[NetworkState]:
    if p.num_atoms > MAX_ENUMERATION_ATOMS:
        raise EnumerationTooLarge(
            f"{p.num_atoms} atoms exceeds enumeration limit of {MAX_ENUMERATION_ATOMS}"
        )
    return {s for s in all_states(p.num_atoms) if count_violations(p, s) == 0}


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValueError("states differ in length")
    return sum(x != y for x, y in zip(a, b))
