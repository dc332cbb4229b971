"""OpenQASM 2.0 subset reader and writer.

Accepted statements: the header, ``include``, ``qreg``/``creg``, catalog gates
(plus ``cp``), ``measure``, ``barrier`` and ``//`` comments. Registers are
flattened to global indices in declaration order.
"""
from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .circuit import Circuit, GateApplication, ProgramMeta
from .gates import CATALOG


class QasmError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col, self.msg = line, col, msg
        super().__init__(f"line {line}:{col}: {msg}" if line else msg)


class QasmSyntaxError(QasmError):
    pass


class QasmUnknownGateError(QasmError):
    pass


class QasmOperandError(QasmError):
    pass


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<header>OPENQASM\s+2\.0)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<op>[-+*/^(),;\[\]{}=<>])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    offset: int


def _tokenize(source: str) -> Iterator[_Tok]:
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise QasmSyntaxError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind, text = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            yield _Tok(kind, text, line, pos - line_start + 1, pos)
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rfind("\n") + 1
        pos = m.end()


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan,
          "exp": math.exp, "ln": math.log, "sqrt": math.sqrt}


def _eval_expr(text: str) -> float:
    # QASM's ^ is power with the precedence of Python's **, not of xor.
    tree = ast.parse(text.strip().replace("^", "**"), mode="eval")

    def ev(node) -> float:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression element {ast.dump(node)}")

    value = ev(tree)
    if not isinstance(value, float) or not math.isfinite(value):
        raise ValueError(f"expression does not evaluate to a finite real: {value!r}")
    return value


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.toks = list(_tokenize(source))
        self.i = 0
        self.qregs: dict[str, tuple[int, int]] = {}
        self.cregs: dict[str, tuple[int, int]] = {}
        self.nq = self.nc = 0
        self.gates: list[GateApplication] = []
        self.measurements: list[tuple[int, int]] = []
        self.measured: set[int] = set()

    # token helpers
    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what: str = "token") -> _Tok:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else _Tok("", "", 1, 1, 0)
            raise QasmSyntaxError(f"unexpected end of input, expected {what}", last.line, last.col)
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next(repr(text))
        if tok.text != text:
            raise QasmSyntaxError(f"expected {text!r}, got {tok.text!r}", tok.line, tok.col)
        return tok

    def expect_kind(self, kind: str) -> _Tok:
        tok = self.next(kind)
        if tok.kind != kind:
            raise QasmSyntaxError(f"expected {kind}, got {tok.text!r}", tok.line, tok.col)
        return tok

    # grammar
    def parse(self) -> None:
        tok = self.next("OPENQASM 2.0 header")
        if tok.kind != "header":
            raise QasmSyntaxError("missing 'OPENQASM 2.0;' header", tok.line, tok.col)
        self.expect(";")
        while self.peek() is not None:
            self.statement()

    def statement(self) -> None:
        tok = self.next()
        if tok.kind != "id":
            raise QasmSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.col)
        word = tok.text
        if word == "include":
            self.expect_kind("string")
            self.expect(";")
        elif word in ("qreg", "creg"):
            self.declaration(word)
        elif word == "measure":
            self.measure(tok)
        elif word == "barrier":
            self.arguments(self.qregs, "qubit")
            self.expect(";")
        elif word in ("gate", "opaque", "if", "reset", "U", "CX"):
            raise QasmSyntaxError(f"unsupported statement {word!r}", tok.line, tok.col)
        else:
            self.gate_call(tok)

    def declaration(self, kind: str) -> None:
        name = self.expect_kind("id")
        self.expect("[")
        size_tok = self.expect_kind("number")
        self.expect("]")
        self.expect(";")
        if not size_tok.text.isdigit():
            raise QasmSyntaxError("register size must be an integer", size_tok.line, size_tok.col)
        size = int(size_tok.text)
        if name.text in self.qregs or name.text in self.cregs:
            raise QasmSyntaxError(f"register {name.text!r} redeclared", name.line, name.col)
        if kind == "qreg":
            self.qregs[name.text] = (self.nq, size)
            self.nq += size
        else:
            self.cregs[name.text] = (self.nc, size)
            self.nc += size

    def argument(self, regs: dict[str, tuple[int, int]], what: str) -> tuple[list[int], _Tok]:
        name = self.expect_kind("id")
        if name.text not in regs:
            raise QasmOperandError(f"unknown {what} register {name.text!r}", name.line, name.col)
        base, size = regs[name.text]
        tok = self.peek()
        if tok is not None and tok.text == "[":
            self.next()
            idx_tok = self.expect_kind("number")
            self.expect("]")
            if not idx_tok.text.isdigit():
                raise QasmSyntaxError("index must be an integer", idx_tok.line, idx_tok.col)
            idx = int(idx_tok.text)
            if idx >= size:
                raise QasmOperandError(f"{what} index {name.text}[{idx}] out of range (size {size})",
                                       idx_tok.line, idx_tok.col)
            return [base + idx], name
        return list(range(base, base + size)), name

    def arguments(self, regs, what) -> list[tuple[list[int], _Tok]]:
        args = [self.argument(regs, what)]
        while self.peek() is not None and self.peek().text == ",":
            self.next()
            args.append(self.argument(regs, what))
        return args

    def measure(self, tok: _Tok) -> None:
        qubits, _ = self.argument(self.qregs, "qubit")
        self.expect_kind("arrow")
        clbits, _ = self.argument(self.cregs, "classical")
        self.expect(";")
        if len(qubits) != len(clbits):
            raise QasmOperandError("measure register sizes differ", tok.line, tok.col)
        for q, c in zip(qubits, clbits):
            self.measurements.append((q, c))
            self.measured.add(q)

    def params(self) -> list[float]:
        open_tok = self.expect("(")
        values, depth, start = [], 0, open_tok.offset + 1
        while True:
            tok = self.next("')'")
            if tok.text == "(":
                depth += 1
            elif tok.text == ")" and depth > 0:
                depth -= 1
            elif tok.text in (",", ")") and depth == 0:
                text = self.source[start:tok.offset]
                try:
                    values.append(_eval_expr(text))
                except (SyntaxError, ValueError, ZeroDivisionError, OverflowError) as exc:
                    raise QasmSyntaxError(f"bad parameter expression {text.strip()!r}: {exc}",
                                          tok.line, tok.col) from None
                start = tok.offset + 1
                if tok.text == ")":
                    return values
            elif tok.text == ";":
                raise QasmSyntaxError("unterminated parameter list", tok.line, tok.col)

    def gate_call(self, tok: _Tok) -> None:
        entry = CATALOG.get(tok.text)
        if entry is None:
            raise QasmUnknownGateError(f"unknown gate {tok.text!r}", tok.line, tok.col)
        params = self.params() if self.peek() is not None and self.peek().text == "(" else []
        if len(params) != entry.param_count:
            raise QasmSyntaxError(f"{tok.text} takes {entry.param_count} parameter(s), got {len(params)}",
                                  tok.line, tok.col)
        args = self.arguments(self.qregs, "qubit")
        self.expect(";")
        if len(args) != entry.arity:
            raise QasmOperandError(f"{tok.text} takes {entry.arity} operand(s), got {len(args)}",
                                   tok.line, tok.col)
        widths = {len(a) for a, _ in args if len(a) > 1}
        if len(widths) > 1:
            raise QasmOperandError("register arguments of different sizes", tok.line, tok.col)
        width = widths.pop() if widths else 1
        for k in range(width):
            operands = tuple(a[k] if len(a) > 1 else a[0] for a, _ in args)
            if len(set(operands)) != len(operands):
                raise QasmOperandError(f"duplicate operand in {tok.text} {list(operands)}", tok.line, tok.col)
            hit = self.measured.intersection(operands)
            if hit:
                raise QasmSyntaxError(f"mid-circuit measurement: {tok.text} acts on measured qubit {min(hit)}",
                                      tok.line, tok.col)
            self.gates.append(GateApplication(tok.text, operands, params))


def parse_qasm(source: str, name: str = "circuit", metadata: Optional[ProgramMeta] = None) -> Circuit:
    """Parse OpenQASM 2.0 text into a :class:`Circuit`."""
    p = _Parser(source)
    p.parse()
    return Circuit(name, p.nq, p.nc, tuple(p.gates), tuple(p.measurements), metadata)


def format_angle(value: float) -> str:
    return format(float(value), ".17g")


def serialize_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    if c.num_clbits:
        lines.append(f"creg c[{c.num_clbits}];")
    for g in c.gates:
        head = g.gate
        if g.params:
            head += "(" + ",".join(format_angle(v) for v in g.params) + ")"
        lines.append(head + " " + ",".join(f"q[{q}]" for q in g.operands) + ";")
    for q, cb in c.measurements:
        lines.append(f"measure q[{q}] -> c[{cb}];")
    return "\n".join(lines) + "\n"
