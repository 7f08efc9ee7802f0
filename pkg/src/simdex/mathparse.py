"""Lexer, parser and normalizer for LaTeX-like formula sources.

The parser builds a *notational* tree: grouping, scripts, fractions,
function applications and primes are explicit, but there is no operator
precedence. Two formulas compare equal only if they are written with the
same letters, symbols and digits in the same arrangement.
"""

from __future__ import annotations

import itertools
import unicodedata
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


class FormulaError(ValueError):
    """Raised for lexing or parsing failures; ``offset`` is a UTF-8 byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


# --------------------------------------------------------------------------
# tokens

@dataclass(frozen=True)
class MathToken:
    kind: str  # ident number op open close sup sub command text begin end rowsep meta
    value: str
    offset: int


FUNCTIONS = frozenset("""
    sin cos tan cot sec csc arcsin arccos arctan sinh cosh tanh coth
    exp ln log lg det arg max min sup inf lim gcd deg dim ker Pr sqrt
""".split())

# take one argument, rendered as a decoration of it
ACCENTS = frozenset("""
    bar hat tilde dot ddot vec overline underline widetilde widehat check breve
""".split())

# wrappers with no notational meaning; the wrapped tokens are kept verbatim
STYLING = frozenset("""
    mathbf mathit mathrm mathsf mathnormal boldsymbol bm textbf textit
    displaystyle textstyle scriptstyle
""".split())

IGNORED = frozenset("""
    quad qquad left right big Big bigg Bigg bigl bigr Bigl Bigr biggl biggr
    nonumber notag limits nolimits middle
""".split())

ALPHABETS = {"mathfrak": "FRAKTUR", "mathbb": "DOUBLE-STRUCK", "mathcal": "SCRIPT"}

TEXT_COMMANDS = frozenset(("text", "mbox", "textrm", "textnormal"))

SYMBOLS = {
    "cdot": "·", "times": "×", "pm": "±", "mp": "∓", "neq": "≠", "ne": "≠",
    "le": "≤", "leq": "≤", "ge": "≥", "geq": "≥", "lt": "<", "gt": ">",
    "approx": "≈", "equiv": "≡", "sim": "∼", "propto": "∝", "to": "→",
    "rightarrow": "→", "leftarrow": "←", "Rightarrow": "⇒", "infty": "∞",
    "partial": "∂", "nabla": "∇", "int": "∫", "iint": "∬", "oint": "∮",
    "sum": "∑", "prod": "∏", "ldots": "…", "cdots": "…", "dots": "…",
    "in": "∈", "prime": "′", "circ": "∘", "ast": "∗", "mid": "|",
}

def _uname(name: str) -> str:
    return "LAMDA" if name.lower() == "lambda" else name.upper()


GREEK = {
    name: unicodedata.lookup(f"GREEK SMALL LETTER {_uname(name)}")
    for name in """alpha beta gamma delta epsilon zeta eta theta iota kappa lambda
                   mu nu xi omicron pi rho sigma tau upsilon phi chi psi omega""".split()
}
GREEK.update({
    name.capitalize(): unicodedata.lookup(f"GREEK CAPITAL LETTER {_uname(name)}")
    for name in "gamma delta theta lambda xi pi sigma upsilon phi psi omega".split()
})
GREEK.update({"varepsilon": "ε", "vartheta": "ϑ", "varphi": "φ", "varrho": "ϱ",
              "varsigma": "ς", "varpi": "ϖ", "varkappa": "ϰ"})

_OPEN = {"(": "paren", "[": "square", "{": "group"}
_CLOSE = {")": "paren", "]": "square", "}": "group"}
_OPS = {"-": "−", "'": "′", "*": "∗"}
_SKIP_CHARS = frozenset(" \t\r\n~&")


def _letter_in(alphabet: str, ch: str) -> str:
    if not ("A" <= ch <= "Z" or "a" <= ch <= "z"):
        return ch
    case = "CAPITAL" if ch.isupper() else "SMALL"
    try:
        return unicodedata.lookup(f"MATHEMATICAL {alphabet} {case} {ch.upper()}")
    except KeyError:
        # letters that predate the mathematical alphanumeric block
        prefix = {"FRAKTUR": "BLACK-LETTER"}.get(alphabet, alphabet)
        return unicodedata.lookup(f"{prefix} {case} {ch.upper()}")


def _read_braced(src: str, i: int) -> tuple[str, int]:
    """Return the raw content of the ``{...}`` starting at ``src[i]``."""
    if i >= len(src) or src[i] != "{":
        raise FormulaError("expected '{'", i)
    depth, j = 0, i
    while j < len(src):
        if src[j] == "{":
            depth += 1
        elif src[j] == "}":
            depth -= 1
            if depth == 0:
                return src[i + 1:j], j + 1
        elif src[j] == "\\":
            j += 1
        j += 1
    raise FormulaError("unbalanced braces", i)


def _skip_ws(src: str, i: int) -> int:
    while i < len(src) and src[i].isspace():
        i += 1
    return i


def lex_formula(source: str, base: int = 0) -> list[MathToken]:
    """Split a formula source into tokens. Letters are always single tokens.

    Token offsets are UTF-8 byte positions, shifted by ``base``.
    """
    byte_at = list(itertools.accumulate((len(c.encode("utf-8")) for c in source), initial=0))
    if not source.strip():
        raise FormulaError("empty formula", base)
    if "\ufffd" in source:
        raise FormulaError("invalid UTF-8 sequence", base + byte_at[source.index("\ufffd")])
    out: list[MathToken] = []

    def braced(j: int) -> tuple[str, int]:
        try:
            return _read_braced(source, _skip_ws(source, j))
        except FormulaError as exc:  # re-anchor the char index as a byte offset
            raise FormulaError(exc.message, base + byte_at[exc.offset]) from None

    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        pos = base + byte_at[i]
        if ch in _SKIP_CHARS:
            i += 1
        elif ch == "\\":
            i += 1
            if i >= n:
                raise FormulaError("dangling backslash", pos)
            if not source[i].isalpha():
                c = source[i]
                i += 1
                if c == "{":
                    out.append(MathToken("open", "brace", pos))
                elif c == "}":
                    out.append(MathToken("close", "brace", pos))
                elif c == "\\":
                    out.append(MathToken("rowsep", "\\\\", pos))
                elif c == "|":
                    out.append(MathToken("op", "‖", pos))
                # \, \; \! \: and "\ " are spacing
                continue
            j = i
            while j < n and source[j].isalpha() and source[j].isascii():
                j += 1
            name = source[i:j]
            i = j
            if name in IGNORED:
                if name in ("left", "right", "middle"):
                    i = _skip_ws(source, i)
                    if i < n and source[i] == ".":
                        i += 1
                continue
            if name in TEXT_COMMANDS:
                raw, i = braced(i)
                out.append(MathToken("text", raw, pos))
            elif name == "operatorname":
                raw, i = braced(i)
                out.append(MathToken("command", raw.strip(), pos))
            elif name in ("begin", "end"):
                env, i = braced(i)
                out.append(MathToken(name, env.strip(), pos))
                if name == "begin" and env.strip() in ("array", "tabular"):
                    _, i = braced(i)
            elif name in GREEK:
                out.append(MathToken("ident", GREEK[name], pos))
            elif name in SYMBOLS:
                out.append(MathToken("op", SYMBOLS[name], pos))
            else:
                out.append(MathToken("command", name, pos))
        elif ch == "#" and i + 1 < n and source[i + 1].isdigit():
            out.append(MathToken("meta", source[i + 1], pos))
            i += 2
        elif ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j + 1 < n and source[j] == "." and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            out.append(MathToken("number", source[i:j], pos))
            i = j
        elif ch.isalpha():
            out.append(MathToken("ident", ch, pos))
            i += 1
        elif ch in _OPEN:
            out.append(MathToken("open", _OPEN[ch], pos))
            i += 1
        elif ch in _CLOSE:
            out.append(MathToken("close", _CLOSE[ch], pos))
            i += 1
        elif ch == "^":
            out.append(MathToken("sup", ch, pos))
            i += 1
        elif ch == "_":
            out.append(MathToken("sub", ch, pos))
            i += 1
        elif ch == "′" or ch == "″":
            for _ in range(1 if ch == "′" else 2):
                out.append(MathToken("op", "′", pos))
            i += 1
        else:
            out.append(MathToken("op", _OPS.get(ch, ch), pos))
            i += 1
    _strip_styling(out)
    return out


def _strip_styling(tokens: list[MathToken]) -> None:
    """Remove styling commands in place, keeping the wrapped tokens verbatim.

    ``\\mathfrak`` and friends are not styling: their letters are rewritten
    into the corresponding Unicode alphabet.
    """
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.kind == "command" and (tok.value in STYLING or tok.value in ALPHABETS):
            alphabet = ALPHABETS.get(tok.value)
            del tokens[i]
            if i < len(tokens) and tokens[i].kind == "open" and tokens[i].value == "group":
                depth, j = 0, i
                while j < len(tokens):
                    if tokens[j].kind == "open":
                        depth += 1
                    elif tokens[j].kind == "close":
                        depth -= 1
                        if depth == 0:
                            break
                    j += 1
                if j == len(tokens):
                    raise FormulaError("unbalanced braces", tokens[i].offset)
                if alphabet:
                    for k in range(i + 1, j):
                        if tokens[k].kind == "ident":
                            tokens[k] = MathToken("ident", _letter_in(alphabet, tokens[k].value),
                                                  tokens[k].offset)
                del tokens[j]
                del tokens[i]
            elif alphabet and i < len(tokens) and tokens[i].kind == "ident":
                tokens[i] = MathToken("ident", _letter_in(alphabet, tokens[i].value),
                                      tokens[i].offset)
            continue
        i += 1


# --------------------------------------------------------------------------
# tree

@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Number:
    text: str


@dataclass(frozen=True)
class Op:
    symbol: str


@dataclass(frozen=True)
class Opaque:
    raw: str


@dataclass(frozen=True)
class Meta:
    """Pattern variable ``#k``; only valid inside normalization rules."""
    index: str


@dataclass(frozen=True)
class Seq:
    children: tuple


@dataclass(frozen=True)
class Group:
    kind: str  # paren | square | brace | group
    child: Optional["Node"]


@dataclass(frozen=True)
class AbsGroup:
    child: Optional["Node"]


@dataclass(frozen=True)
class Script:
    base: "Node"
    sub: Optional["Node"] = None
    sup: Optional["Node"] = None


@dataclass(frozen=True)
class Frac:
    numerator: "Node"
    denominator: "Node"


@dataclass(frozen=True)
class Func:
    name: str
    arg: Optional[Group] = None


@dataclass(frozen=True)
class Prime:
    base: "Node"
    count: int


@dataclass(frozen=True)
class Env:
    name: str
    rows: tuple


Node = Union[Ident, Number, Op, Opaque, Meta, Seq, Group, AbsGroup, Script, Frac,
             Func, Prime, Env]
LEAVES = (Ident, Number, Op, Opaque, Meta)


def _wrap(nodes: list) -> Optional[Node]:
    if not nodes:
        return None
    if len(nodes) == 1:
        return nodes[0]
    return Seq(tuple(nodes))


def children(node: Node) -> tuple:
    """Direct child nodes, in pre-order traversal order."""
    if isinstance(node, Seq):
        return node.children
    if isinstance(node, Env):
        return node.rows
    if isinstance(node, (Group, AbsGroup)):
        return (node.child,) if node.child is not None else ()
    if isinstance(node, Script):
        return tuple(c for c in (node.base, node.sub, node.sup) if c is not None)
    if isinstance(node, Frac):
        return (node.numerator, node.denominator)
    if isinstance(node, Func):
        return (node.arg,) if node.arg is not None else ()
    if isinstance(node, Prime):
        return (node.base,)
    return ()


def leaves(node: Node) -> Iterator[tuple[str, str]]:
    """Yield ``(kind, label)`` for every leaf in pre-order."""
    if isinstance(node, Ident):
        yield ("ident", node.name)
    elif isinstance(node, Number):
        yield ("number", node.text)
    elif isinstance(node, Op):
        yield ("op", node.symbol)
    elif isinstance(node, Opaque):
        yield ("opaque", node.raw)
    elif isinstance(node, Meta):
        yield ("meta", node.index)
    elif isinstance(node, Func):
        yield ("func", node.name)
        if node.arg is not None:
            yield from leaves(node.arg)
    elif isinstance(node, Prime):
        yield from leaves(node.base)
        for _ in range(node.count):
            yield ("op", "′")
    else:
        for c in children(node):
            yield from leaves(c)


def leaf_count(node: Node) -> int:
    """Number of atomic leaves; prime marks count one each."""
    return sum(1 for _ in leaves(node))


def to_latex(node: Optional[Node]) -> str:
    """Render a tree back to a compact source string (for display and debugging)."""
    if node is None:
        return ""
    if isinstance(node, Ident):
        return node.name
    if isinstance(node, Number):
        return node.text
    if isinstance(node, Op):
        return {"−": "-", "′": "'"}.get(node.symbol, node.symbol)
    if isinstance(node, Opaque):
        return f"\\text{{{node.raw}}}"
    if isinstance(node, Meta):
        return f"#{node.index}"
    if isinstance(node, Seq):
        return " ".join(to_latex(c) for c in node.children)
    if isinstance(node, Group):
        left, right = {"paren": "()", "square": "[]", "brace": ("\\{", "\\}"),
                       "group": "{}"}[node.kind]
        return f"{left}{to_latex(node.child)}{right}"
    if isinstance(node, AbsGroup):
        return f"|{to_latex(node.child)}|"
    if isinstance(node, Script):
        s = to_latex(node.base)
        if node.sub is not None:
            s += "_{" + to_latex(node.sub) + "}"
        if node.sup is not None:
            s += "^{" + to_latex(node.sup) + "}"
        return s
    if isinstance(node, Frac):
        return f"\\frac{{{to_latex(node.numerator)}}}{{{to_latex(node.denominator)}}}"
    if isinstance(node, Func):
        return f"\\{node.name}" + ("" if node.arg is None else to_latex(node.arg))
    if isinstance(node, Prime):
        return to_latex(node.base) + "'" * node.count
    if isinstance(node, Env):
        body = " \\\\ ".join(to_latex(r) for r in node.rows)
        return f"\\begin{{{node.name}}} {body} \\end{{{node.name}}}"
    raise TypeError(node)


# --------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, tokens: list[MathToken]):
        self.toks = tokens
        self.i = 0
        self.abs_depth = 0

    def peek(self) -> Optional[MathToken]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> MathToken:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def end_offset(self) -> int:
        return self.toks[-1].offset if self.toks else 0

    def seq(self, closer: Optional[str] = None, in_env: bool = False) -> list:
        nodes: list = []
        while True:
            tok = self.peek()
            if tok is None:
                return nodes
            if tok.kind == "close":
                if closer is None:
                    raise FormulaError(f"unbalanced closing {tok.value}", tok.offset)
                return nodes
            if tok.kind == "op" and tok.value == "|" and self.abs_depth and closer == "|":
                return nodes
            if in_env and tok.kind in ("rowsep", "end"):
                return nodes
            if tok.kind == "rowsep":
                raise FormulaError("row separator outside environment", tok.offset)
            if tok.kind == "end":
                raise FormulaError(f"unmatched \\end{{{tok.value}}}", tok.offset)
            nodes.append(self.postfix(self.atom()))

    def atom(self) -> Node:
        tok = self.take()
        k = tok.kind
        if k == "ident":
            return Ident(tok.value)
        if k == "number":
            return Number(tok.value)
        if k == "meta":
            return Meta(tok.value)
        if k == "text":
            return Opaque(tok.value)
        if k in ("sup", "sub"):
            raise FormulaError(f"dangling '{tok.value}'", tok.offset)
        if k == "op":
            if tok.value == "|":
                return self.abs_group(tok)
            return Op(tok.value)
        if k == "open":
            return self.group(tok)
        if k == "begin":
            return self.env(tok)
        if k == "command":
            return self.command(tok)
        raise FormulaError(f"unexpected token {tok.value!r}", tok.offset)

    def group(self, opener: MathToken) -> Node:
        saved, self.abs_depth = self.abs_depth, 0
        content = self.seq(closer=opener.value)
        self.abs_depth = saved
        close = self.peek()
        if close is None:
            raise FormulaError(f"unclosed {opener.value}", opener.offset)
        if close.value != opener.value:
            raise FormulaError(f"{opener.value} closed by {close.value}", close.offset)
        self.take()
        if opener.value == "group":
            # invisible braces only group; they never change the notation
            wrapped = _wrap(content)
            return wrapped if wrapped is not None else Group("group", None)
        return Group(opener.value, _wrap(content))

    def abs_group(self, opener: MathToken) -> Node:
        self.abs_depth += 1
        content = self.seq(closer="|")
        self.abs_depth -= 1
        close = self.peek()
        if close is None or close.value != "|":
            raise FormulaError("unpaired '|'", opener.offset)
        self.take()
        return AbsGroup(_wrap(content))

    def env(self, opener: MathToken) -> Node:
        rows = []
        while True:
            row = self.seq(in_env=True)
            tok = self.peek()
            if tok is None:
                raise FormulaError(f"unclosed environment {opener.value}", opener.offset)
            self.take()
            if row:
                rows.append(Seq(tuple(row)))
            if tok.kind == "end":
                if tok.value != opener.value:
                    raise FormulaError(f"\\begin{{{opener.value}}} closed by "
                                       f"\\end{{{tok.value}}}", tok.offset)
                return Env(opener.value, tuple(rows))

    def argument(self, owner: MathToken) -> Node:
        """One mandatory argument: a braced group or a single atom."""
        tok = self.peek()
        if tok is None or tok.kind in ("close", "sup", "sub", "rowsep", "end"):
            raise FormulaError(f"\\{owner.value} needs an argument", owner.offset)
        if tok.kind == "open" and tok.value == "group":
            self.take()
            content = self.seq(closer="group")
            if self.peek() is None or self.peek().value != "group":
                raise FormulaError("unclosed group", tok.offset)
            self.take()
            return _wrap(content) if content else Group("group", None)
        return self.atom()

    def command(self, tok: MathToken) -> Node:
        name = tok.value
        if name in ("frac", "dfrac", "tfrac", "cfrac"):
            num = self.argument(tok)
            den = self.argument(tok)
            return Frac(num, den)
        if name in ACCENTS:
            return Func(name, Group("group", self.argument(tok)))
        if name in FUNCTIONS:
            scripts = self.scripts()
            if name == "sqrt":
                nxt = self.peek()
                index = None
                if nxt is not None and nxt.kind == "open" and nxt.value == "square":
                    index = self.group(self.take())
                body = Group("group", self.argument(tok))
                arg = body if index is None else Group("group", Seq((index, body.child)))
                func = Func(name, arg)
            else:
                func = Func(name, self.func_arg())
            if scripts:
                return Script(func, scripts.get("sub"), scripts.get("sup"))
            return func
        nxt = self.peek()
        if nxt is not None and nxt.kind == "open" and nxt.value == "group":
            return Func(name, Group("group", self.argument(tok)))
        return Opaque("\\" + name)

    def func_arg(self) -> Optional[Group]:
        tok = self.peek()
        if tok is None or tok.kind in ("close", "rowsep", "end", "sup", "sub"):
            return None
        if tok.kind == "op" and tok.value != "|":
            return None
        if tok.kind == "open":
            if tok.value == "group":
                return Group("group", self.argument(tok))
            grp = self.group(self.take())
            return grp if isinstance(grp, Group) else Group("group", grp)
        return Group("group", self.postfix(self.atom()))

    def scripts(self) -> dict:
        found: dict = {}
        while True:
            tok = self.peek()
            if tok is None or tok.kind not in ("sup", "sub"):
                return found
            self.take()
            key = tok.kind
            if key in found:
                raise FormulaError(f"double {'superscript' if key == 'sup' else 'subscript'}",
                                   tok.offset)
            found[key] = self.script_arg(tok)

    def script_arg(self, op: MathToken) -> Node:
        tok = self.peek()
        if tok is None or tok.kind in ("close", "sup", "sub", "rowsep", "end"):
            raise FormulaError(f"dangling '{op.value}'", op.offset)
        if tok.kind == "number" and len(tok.value) > 1:
            # TeX takes a single character: x^12 is x^{1}2
            self.toks[self.i] = MathToken("number", tok.value[1:], tok.offset + 1)
            return Number(tok.value[0])
        if tok.kind == "open" and tok.value == "group":
            return self.argument(op)
        if tok.kind == "open":
            return self.group(self.take())
        return self.atom()

    def postfix(self, node: Node) -> Node:
        while True:
            tok = self.peek()
            if tok is None:
                return node
            if tok.kind == "op" and tok.value == "′":
                count = 0
                while self.peek() is not None and self.peek().kind == "op" \
                        and self.peek().value == "′":
                    self.take()
                    count += 1
                node = Prime(node, count)
            elif tok.kind in ("sup", "sub"):
                scripts = self.scripts()
                node = Script(node, scripts.get("sub"), scripts.get("sup"))
            else:
                return node


def parse_formula(tokens: list[MathToken]) -> Seq:
    """Parse a token list into a tree whose root is always a :class:`Seq`."""
    if not tokens:
        raise FormulaError("empty formula", 0)
    bars = [t for t in tokens if t.kind == "op" and t.value == "|"]
    if len(bars) % 2:
        raise FormulaError("odd number of '|'", bars[-1].offset)
    p = _Parser(tokens)
    nodes = p.seq()
    if p.peek() is not None:
        tok = p.peek()
        raise FormulaError(f"unexpected {tok.value!r}", tok.offset)
    if not nodes:
        raise FormulaError("formula has no content", tokens[0].offset)
    return Seq(tuple(nodes))


def parse(source: str) -> Seq:
    """Lex and parse ``source`` (no normalization)."""
    return parse_formula(lex_formula(source))


def trim_punctuation(root: Seq) -> Seq:
    """Drop sentence punctuation trailing a display formula or its rows."""

    def trim(seq: Seq) -> Seq:
        kids = list(seq.children)
        while len(kids) > 1 and isinstance(kids[-1], Op) and kids[-1].symbol in (",", ".", ";"):
            kids.pop()
        if kids and isinstance(kids[-1], Env):
            env = kids[-1]
            kids[-1] = Env(env.name, tuple(trim(r) for r in env.rows))
        return Seq(tuple(kids))

    return trim(root)


# --------------------------------------------------------------------------
# normalization

@dataclass(frozen=True)
class Rule:
    pattern: Node
    replacement: Node
    source: str = field(default="", compare=False)


def _match(pattern: Node, node: Node, env: dict) -> bool:
    if isinstance(pattern, Meta):
        if pattern.index in env:
            return env[pattern.index] == node
        env[pattern.index] = node
        return True
    if type(pattern) is not type(node):
        return False
    if isinstance(pattern, LEAVES):
        return pattern == node
    for fname in pattern.__dataclass_fields__:
        pv, nv = getattr(pattern, fname), getattr(node, fname)
        if isinstance(pv, tuple):
            if not isinstance(nv, tuple) or len(pv) != len(nv):
                return False
            if not all(_match(a, b, env) for a, b in zip(pv, nv)):
                return False
        elif pv is None or nv is None:
            if pv is not nv:
                return False
        elif hasattr(pv, "__dataclass_fields__"):
            if not _match(pv, nv, env):
                return False
        elif pv != nv:
            return False
    return True


def _substitute(node, env: dict):
    if isinstance(node, Meta):
        return env[node.index]
    if node is None or isinstance(node, LEAVES):
        return node
    values = {}
    for fname in node.__dataclass_fields__:
        v = getattr(node, fname)
        if isinstance(v, tuple):
            v = tuple(_substitute(c, env) for c in v)
        elif hasattr(v, "__dataclass_fields__"):
            v = _substitute(v, env)
        values[fname] = v
    return type(node)(**values)


def _metas(node) -> set:
    if isinstance(node, Meta):
        return {node.index}
    out: set = set()
    for c in children(node) if node is not None else ():
        out |= _metas(c)
    return out


def _strip_root(node: Node) -> Node:
    if isinstance(node, Seq) and len(node.children) == 1:
        return node.children[0]
    return node


def parse_rule(line: str) -> Rule:
    """Parse ``pattern => replacement`` written in formula syntax with ``#k`` variables."""
    if "=>" not in line:
        raise ValueError(f"rule without '=>': {line!r}")
    lhs, rhs = line.split("=>", 1)
    pattern = _strip_root(parse(lhs))
    replacement = _strip_root(parse(rhs))
    if isinstance(pattern, Meta):
        raise ValueError(f"rule pattern is a bare variable: {line!r}")
    if not _metas(replacement) <= _metas(pattern):
        raise ValueError(f"replacement uses unbound variables: {line!r}")
    return Rule(pattern, replacement, line.strip())


DEFAULT_RULES = ("e^{#1} => \\exp{#1}",)


@dataclass(frozen=True)
class NormalizationTable:
    rules: tuple = ()
    max_rounds: int = 64

    @classmethod
    def default(cls) -> "NormalizationTable":
        return cls(tuple(parse_rule(r) for r in DEFAULT_RULES))

    @classmethod
    def from_lines(cls, lines, include_defaults: bool = True) -> "NormalizationTable":
        rules = list(cls.default().rules) if include_defaults else []
        for raw in lines:
            line = raw.split("%", 1)[0].strip()
            if line and not line.startswith("#"):
                rules.append(parse_rule(line))
        return cls(tuple(rules))


def _rewrite_children(node: Node, fn) -> Node:
    if isinstance(node, LEAVES):
        return node
    values = {}
    for fname in node.__dataclass_fields__:
        v = getattr(node, fname)
        if isinstance(v, tuple):
            v = tuple(fn(c) for c in v)
        elif hasattr(v, "__dataclass_fields__"):
            v = fn(v)
        values[fname] = v
    return type(node)(**values)


def normalize(ast: Node, table: Optional[NormalizationTable] = None) -> Node:
    """Rewrite notation synonyms bottom-up until no rule applies."""
    if table is None:
        table = NormalizationTable.default()
    if not table.rules:
        return ast
    budget = [table.max_rounds * (leaf_count(ast) + 1)]

    def visit(node: Node) -> Node:
        node = _rewrite_children(node, visit)
        for rule in table.rules:
            env: dict = {}
            if _match(rule.pattern, node, env):
                budget[0] -= 1
                if budget[0] < 0:
                    raise RuntimeError("normalization rules do not terminate")
                return visit(_substitute(rule.replacement, env))
        return node

    return visit(ast)


def parse_normalized(source: str, table: Optional[NormalizationTable] = None) -> Node:
    return normalize(parse(source), table)
