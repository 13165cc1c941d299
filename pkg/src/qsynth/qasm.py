"""
OPENQASM 2.0 emission and a parser for the emitted subset.

Output format (fixed, so golden files stay stable):

    OPENQASM 2.0;
    include "qelib1.inc";
    qreg <name>[<width>];          one per register, declaration order
    creg meas[<k>];                only if something is measured
    // block: <name>(<params>)     optional block annotations
    cx a[0], b[1];                 one instruction per line
    measure a[0] -> meas[0];
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .circuit import Circuit, Gate, GateKind, QubitRef, ccx
from .errors import (
    OverlapError,
    QasmIndexError,
    QasmSyntaxError,
    QasmUnknownInstructionError,
    UnbalancedAncillaError,
)

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
NATIVE_C3X = "native_c3x"
DECOMPOSE_CCX = "decompose_ccx"
_COMMENT_PREFIX = "// block: "


@dataclass(frozen=True)
class EmitOptions:
    cccx_mode: str = NATIVE_C3X
    include_comments: bool = True

    def __post_init__(self):
        if self.cccx_mode not in (NATIVE_C3X, DECOMPOSE_CCX):
            raise ValueError(f"unknown cccx_mode {self.cccx_mode!r}")


def _fresh_name(base: str, taken: set[str]) -> str:
    name, i = base, 0
    while name in taken:
        name = f"{base}_{i}"
        i += 1
    return name


def _gate_line(kind: str, qubits) -> str:
    return f"{kind} {', '.join(map(str, qubits))};"


def emit(c: Circuit, opts: EmitOptions | None = None) -> str:
    """Serialize a circuit. Ancillas must have been materialized by plot_ancilla."""
    opts = opts or EmitOptions()
    if c.pool.live:
        raise UnbalancedAncillaError(f"{c.pool.live} ancilla slot(s) still live")
    if not c.finalized and c.pool.watermark:
        raise UnbalancedAncillaError("ancillas used but plot_ancilla() was not called")

    decls = [(r.name, r.width) for r in c.registers]
    scratch = None
    if opts.cccx_mode == DECOMPOSE_CCX and any(g.kind is GateKind.CCCX for g in c.gates):
        # one extra zeroed pool slot, never touched by any other gate
        anc = c.ancilla_register
        if anc is not None:
            decls[anc.order] = (anc.name, anc.width + 1)
            scratch = QubitRef(anc.name, anc.width)
        else:
            name = _fresh_name(c.pool.register, {n for n, _ in decls})
            decls.append((name, 1))
            scratch = QubitRef(name, 0)

    lines = [f"qreg {name}[{width}];" for name, width in decls]
    creg = None
    if c.measured:
        creg = _fresh_name("meas", {n for n, _ in decls})
        lines.append(f"creg {creg}[{len(c.measured)}];")

    notes: dict[int, list[str]] = {}
    if opts.include_comments:
        for pos, label in c.annotations:
            notes.setdefault(pos, []).append(label)
    for i, g in enumerate(c.gates):
        lines += [_COMMENT_PREFIX + label for label in notes.get(i, ())]
        if g.kind is GateKind.CCCX and scratch is not None:
            c1, c2, c3 = g.controls
            for step in (ccx(c1, c2, scratch), ccx(scratch, c3, g.target), ccx(c1, c2, scratch)):
                lines.append(_gate_line(step.kind.value, step.qubits))
        else:
            lines.append(_gate_line(g.kind.value, g.qubits))
    lines += [_COMMENT_PREFIX + label for label in notes.get(len(c.gates), ())]
    for j, q in enumerate(c.measured):
        lines.append(f"measure {q} -> {creg}[{j}];")
    return HEADER + "".join(line + "\n" for line in lines)


def write(c: Circuit, path, opts: EmitOptions | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(emit(c, opts))


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<real>\d+\.\d*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<sym>[\[\];,])
  | (?P<bad>.)
""", re.VERBOSE)

_ARITY = {"x": 1, "h": 1, "z": 1, "cx": 2, "ccx": 3, "c3x": 4}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> Iterator[_Tok]:
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - line_start + 1
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind == "bad":
            raise QasmSyntaxError("unexpected character", line, col, m.group())
        elif kind != "ws":
            yield _Tok(kind, m.group(), line, col)


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokenize(text))
        self.pos = 0
        self.eof_line = text.count("\n") + 1

    def peek(self) -> _Tok | None:
        while self.pos < len(self.toks) and self.toks[self.pos].kind == "comment":
            self.pos += 1
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self, expect_kind: str | None = None, expect_text: str | None = None,
             what: str = "") -> _Tok:
        tok = self.peek()
        if tok is None:
            raise QasmSyntaxError(f"unexpected end of input, expected {what or expect_text or expect_kind}",
                                  self.eof_line, 1)
        if (expect_kind and tok.kind != expect_kind) or (expect_text and tok.text != expect_text):
            raise QasmSyntaxError(f"expected {what or expect_text or expect_kind}",
                                  tok.line, tok.col, tok.text)
        self.pos += 1
        return tok

    def comments_before_next(self) -> list[_Tok]:
        out = []
        while self.pos < len(self.toks) and self.toks[self.pos].kind == "comment":
            out.append(self.toks[self.pos])
            self.pos += 1
        return out


def parse(text: str) -> Circuit:
    """Parse the emitted OPENQASM 2.0 subset back into a (finalized) circuit.

    Block comments are restored as annotations, so emit(parse(emit(c))) is
    byte-identical to emit(c).
    """
    p = _Parser(text)
    first = p.peek()
    if first is None or first.text != "OPENQASM":
        line, col, tok = (first.line, first.col, first.text) if first else (1, 1, "")
        raise QasmSyntaxError("missing 'OPENQASM 2.0;' header", line, col, tok)
    p.next()
    version = p.next(what="version number")
    if version.text != "2.0":
        raise QasmSyntaxError("only OPENQASM 2.0 is supported", version.line, version.col,
                              version.text)
    p.next("sym", ";")

    qregs: dict[str, int] = {}
    cregs: dict[str, int] = {}
    gates: list[Gate] = []
    annotations: list[tuple[int, str]] = []
    measured: dict[tuple[str, int], QubitRef] = {}

    def operand(regs: dict[str, int], instr: _Tok, noun: str) -> tuple[str, int]:
        name = p.next("ident", what=f"{noun} register name")
        if name.text not in regs:
            raise QasmSyntaxError(f"undeclared {noun} register in '{instr.text}'",
                                  name.line, name.col, name.text)
        p.next("sym", "[")
        idx = p.next("int", what="index")
        p.next("sym", "]")
        if int(idx.text) >= regs[name.text]:
            raise QasmIndexError(
                f"index {name.text}[{idx.text}] out of range for {noun} register "
                f"{name.text}[{regs[name.text]}] in '{instr.text}'",
                idx.line, idx.col, idx.text)
        return name.text, int(idx.text)

    while True:
        for com in p.comments_before_next():
            if com.text.startswith(_COMMENT_PREFIX):
                annotations.append((len(gates), com.text[len(_COMMENT_PREFIX):]))
        tok = p.peek()
        if tok is None:
            break
        p.next()
        word = tok.text
        if tok.kind != "ident":
            raise QasmSyntaxError("expected a statement", tok.line, tok.col, word)
        if word == "include":
            inc = p.next("string", what="include file name")
            if inc.text != '"qelib1.inc"':
                raise QasmSyntaxError("only qelib1.inc can be included", inc.line, inc.col,
                                      inc.text)
            p.next("sym", ";")
        elif word in ("qreg", "creg"):
            name = p.next("ident", what="register name")
            if name.text in qregs or name.text in cregs:
                raise QasmSyntaxError("duplicate register", name.line, name.col, name.text)
            p.next("sym", "[")
            size = p.next("int", what="register size")
            p.next("sym", "]")
            p.next("sym", ";")
            if int(size.text) < 1:
                raise QasmSyntaxError("register size must be positive", size.line, size.col,
                                      size.text)
            (qregs if word == "qreg" else cregs)[name.text] = int(size.text)
        elif word in _ARITY:
            if measured:
                raise QasmSyntaxError("gates after measurement are not supported",
                                      tok.line, tok.col, word)
            args = [operand(qregs, tok, "quantum")]
            while p.peek() is not None and p.peek().text == ",":
                p.next()
                args.append(operand(qregs, tok, "quantum"))
            p.next("sym", ";")
            if len(args) != _ARITY[word]:
                raise QasmSyntaxError(f"'{word}' takes {_ARITY[word]} qubit(s), got {len(args)}",
                                      tok.line, tok.col, word)
            refs = [QubitRef(*a) for a in args]
            try:
                gates.append(Gate(GateKind(word), tuple(refs[:-1]), refs[-1]))
            except OverlapError as err:
                raise QasmSyntaxError(str(err), tok.line, tok.col, word) from None
        elif word == "measure":
            q = operand(qregs, tok, "quantum")
            p.next("arrow", what="'->'")
            bit = operand(cregs, tok, "classical")
            p.next("sym", ";")
            if bit in measured:
                raise QasmSyntaxError("classical bit written twice", tok.line, tok.col, word)
            measured[bit] = QubitRef(*q)
        elif word == "barrier":
            # accepted and ignored
            while p.peek() is not None and p.peek().text != ";":
                p.next()
            p.next("sym", ";")
        else:
            raise QasmUnknownInstructionError(f"unknown instruction '{word}'",
                                              tok.line, tok.col, word)

    c = Circuit(_fresh_name("anc", set(qregs) | set(cregs)))
    for name, width in qregs.items():
        c.add_register(name, width)
    c.gates = gates
    c.annotations = annotations
    order = [(name, j) for name, width in cregs.items() for j in range(width)]
    c.measure([measured[b] for b in order if b in measured])
    c.plot_ancilla()
    return c


def read(path) -> Circuit:
    with open(path, encoding="utf-8") as f:
        return parse(f.read())
