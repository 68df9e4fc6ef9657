"""Term syntax over a signature, with parsing, printing and interpretation.

Grammar (loosest to tightest binding)::

    join  := seq ('+' seq)*            n-ary alternative, flattened
    seq   := tens (';' tens)*          sequential composition, left-assoc
    tens  := atom ('*' atom)*          parallel composition, left-assoc
    atom  := '(' join ')' | 'id' ':' INT | 'sym' ':' INT ',' INT | NAME

Signature files contain lines ``name : n -> m``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .core import Generator, Signature
from . import cospan as cs


class TermTypeError(Exception):
    pass


class TermSyntaxError(Exception):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (column {position + 1})")


@dataclass(frozen=True)
class Gen:
    name: str


@dataclass(frozen=True)
class Id:
    width: int


@dataclass(frozen=True)
class Sym:
    left: int
    right: int


@dataclass(frozen=True)
class Comp:
    first: "Term"
    second: "Term"


@dataclass(frozen=True)
class Tensor:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Join:
    parts: tuple["Term", ...]

    def __post_init__(self):
        if not self.parts:
            raise TermTypeError("empty alternative")


Term = Union[Gen, Id, Sym, Comp, Tensor, Join]


@dataclass(frozen=True)
class TermType:
    dom: int
    cod: int


def typecheck(t: Term, sig: Signature) -> TermType:
    """Infer the type of a term; rejects subterms with no inputs and no outputs."""
    ty = _infer(t, sig)
    return ty


def _infer(t: Term, sig: Signature) -> TermType:
    if isinstance(t, Gen):
        if t.name not in sig:
            raise TermTypeError(f"unknown generator: {t.name}")
        ar, coar = sig.arity(t.name)
        ty = TermType(ar, coar)
    elif isinstance(t, Id):
        if t.width < 0:
            raise TermTypeError("identity of negative width")
        ty = TermType(t.width, t.width)
    elif isinstance(t, Sym):
        if t.left < 0 or t.right < 0:
            raise TermTypeError("wire crossing of negative width")
        ty = TermType(t.left + t.right, t.left + t.right)
    elif isinstance(t, Comp):
        a, b = _infer(t.first, sig), _infer(t.second, sig)
        if a.cod != b.dom:
            raise TermTypeError(
                f"composition mismatch: {a.cod} outputs vs {b.dom} inputs"
            )
        ty = TermType(a.dom, b.cod)
    elif isinstance(t, Tensor):
        a, b = _infer(t.left, sig), _infer(t.right, sig)
        ty = TermType(a.dom + b.dom, a.cod + b.cod)
    elif isinstance(t, Join):
        types = {_infer(part, sig) for part in t.parts}
        if len(types) > 1:
            raise TermTypeError(f"alternative branches differ in type: {sorted((x.dom, x.cod) for x in types)}")
        ty = types.pop()
    else:  # pragma: no cover
        raise TermTypeError(f"unknown term node: {t!r}")
    if ty.dom == 0 and ty.cod == 0:
        raise TermTypeError(f"subterm of type 0 -> 0 is not supported: {print_term(t)}")
    return ty


def interpret(t: Term, sig: Signature) -> cs.ExtendedCospan:
    """Compile a term to a cospan, structurally."""
    typecheck(t, sig)
    return _interp(t, sig)


def _interp(t: Term, sig: Signature) -> cs.ExtendedCospan:
    if isinstance(t, Gen):
        return cs.generator_cospan(sig[t.name])
    if isinstance(t, Id):
        return cs.identity_cospan(t.width)
    if isinstance(t, Sym):
        return cs.symmetry_cospan(t.left, t.right)
    if isinstance(t, Comp):
        return cs.compose(_interp(t.first, sig), _interp(t.second, sig))
    if isinstance(t, Tensor):
        return cs.tensor(_interp(t.left, sig), _interp(t.right, sig))
    if isinstance(t, Join):
        return cs.join([_interp(part, sig) for part in t.parts])
    raise TermTypeError(f"unknown term node: {t!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<sym>[;*+():,]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise TermSyntaxError(f"unexpected character {stripped[0]!r}", pos)
        if m.group("name"):
            tokens.append(("name", m.group("name"), m.start("name")))
        elif m.group("int"):
            tokens.append(("int", m.group("int"), m.start("int")))
        else:
            tokens.append(("sym", m.group("sym"), m.start("sym")))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise TermSyntaxError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value:
            raise TermSyntaxError(f"expected {value!r}, got {tok[1]!r}", tok[2])
        return tok

    def parse(self) -> Term:
        t = self.join()
        if self.peek() is not None:
            tok = self.peek()
            raise TermSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return t

    def join(self) -> Term:
        parts = [self.seq()]
        while self.peek() and self.peek()[1] == "+":
            self.next()
            part = self.seq()
            if isinstance(part, Join):
                parts.extend(part.parts)
            else:
                parts.append(part)
        head = parts[0]
        if len(parts) == 1:
            return head
        flat: list[Term] = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, Join) else (p,))
        return Join(tuple(flat))

    def seq(self) -> Term:
        t = self.tens()
        while self.peek() and self.peek()[1] == ";":
            self.next()
            t = Comp(t, self.tens())
        return t

    def tens(self) -> Term:
        t = self.atom()
        while self.peek() and self.peek()[1] == "*":
            self.next()
            t = Tensor(t, self.atom())
        return t

    def atom(self) -> Term:
        tok = self.next()
        kind, value, at = tok
        if value == "(":
            inner = self.join()
            self.expect(")")
            return inner
        if kind == "name" and value == "id":
            self.expect(":")
            n = self.next()
            if n[0] != "int":
                raise TermSyntaxError("expected width after 'id:'", n[2])
            return Id(int(n[1]))
        if kind == "name" and value == "sym":
            self.expect(":")
            a = self.next()
            self.expect(",")
            b = self.next()
            if a[0] != "int" or b[0] != "int":
                raise TermSyntaxError("expected widths after 'sym:'", at)
            return Sym(int(a[1]), int(b[1]))
        if kind == "name":
            return Gen(value)
        raise TermSyntaxError(f"unexpected token {value!r}", at)


def parse(text: str) -> Term:
    return _Parser(text).parse()


def print_term(t: Term) -> str:
    return _print(t, 0)


def _print(t: Term, level: int) -> str:
    # Levels: 0 = alternative, 1 = sequential, 2 = parallel, 3 = atom.
    if isinstance(t, Gen):
        return t.name
    if isinstance(t, Id):
        return f"id:{t.width}"
    if isinstance(t, Sym):
        return f"sym:{t.left},{t.right}"
    if isinstance(t, Join):
        body = " + ".join(_print(p, 1) for p in t.parts)
        return f"({body})" if level > 0 else body
    if isinstance(t, Comp):
        body = f"{_print(t.first, 1)} ; {_print(t.second, 2)}"
        return f"({body})" if level > 1 else body
    if isinstance(t, Tensor):
        body = f"{_print(t.left, 2)} * {_print(t.right, 3)}"
        return f"({body})" if level > 2 else body
    raise ValueError(f"unknown term node: {t!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# Signature files
# ---------------------------------------------------------------------------

_SIG_LINE = re.compile(
    r"^\s*(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*:\s*(?P<dom>\d+)\s*->\s*(?P<cod>\d+)\s*$"
)


def parse_signature(text: str, cartesian: bool = False) -> Signature:
    """Parse ``name : n -> m`` lines; '#' starts a comment, blank lines skipped."""
    gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SIG_LINE.match(line)
        if not m:
            raise ValueError(f"signature line {lineno}: cannot parse {raw!r}")
        gens.append(Generator(m.group("name"), int(m.group("dom")), int(m.group("cod"))))
    return Signature(gens, cartesian=cartesian)
