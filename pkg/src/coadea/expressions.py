"""Recursive-descent parser for small arithmetic expressions in x1..xn.

Supported: numbers, variables x1..xn, + - * / ^ (also the glyphs × and ÷),
unary minus, parentheses. '^' is exponentiation and binds tighter than '*',
right-associative. Compiled expressions are plain closures over float math,
pure by construction.
"""
from __future__ import annotations

import re
from typing import Callable

import numpy as np

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|(x\d+)|([()+\-*/^]))")


class ExpressionError(ValueError):
    """The expression text cannot be parsed or references an unknown variable."""


def _tokenize(text: str) -> list[tuple[str, str]]:
    text = text.replace("×", "*").replace("÷", "/").replace("**", "^")
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ExpressionError(f"unexpected character {text[pos:].strip()[0]!r} in {text!r}")
        pos = m.end()
        if m.group(1):
            tokens.append(("num", m.group(1)))
        elif m.group(2):
            tokens.append(("var", m.group(2)))
        else:
            tokens.append(("op", m.group(3)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]], n_var: int, text: str):
        self.tokens = tokens
        self.pos = 0
        self.n_var = n_var
        self.text = text

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.pos != len(self.tokens):
            raise ExpressionError(f"trailing input near token {self.peek()[1]!r} in {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = (op, node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = (op, node, rhs)
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return ("^", base, self.unary())  # right-assoc, exponent may be signed
        return base

    def atom(self):
        kind, value = self.take()
        if kind == "num":
            return ("num", float(value))
        if kind == "var":
            index = int(value[1:])
            if not 1 <= index <= self.n_var:
                raise ExpressionError(f"variable {value!r} out of range (n_var={self.n_var})")
            return ("var", index - 1)
        if (kind, value) == ("op", "("):
            node = self.expr()
            if self.take() != ("op", ")"):
                raise ExpressionError(f"missing ')' in {self.text!r}")
            return node
        raise ExpressionError(f"expected number, variable or '(' in {self.text!r}")


def _eval_node(node, x) -> float:
    op = node[0]
    if op == "num":
        return node[1]
    if op == "var":
        return float(x[node[1]])
    if op == "neg":
        return -_eval_node(node[1], x)
    a = _eval_node(node[1], x)
    b = _eval_node(node[2], x)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    return a ** b  # "^"


def compile_expression(text: str, n_var: int) -> Callable[[np.ndarray], float]:
    """Parse once, return a float-valued evaluator over a coordinate vector."""
    tokens = _tokenize(text)
    if not tokens:
        raise ExpressionError("empty expression")
    node = _Parser(tokens, n_var, text).parse()
    return lambda x, _node=node: _eval_node(_node, x)


def split_constraint(text: str, n_var: int) -> Callable[[np.ndarray], float]:
    """Parse "lhs <= rhs" or "lhs >= rhs" into g with the convention g(x) <= 0."""
    if "<=" in text:
        lhs_text, rhs_text = text.split("<=", 1)
        flip = False
    elif ">=" in text:
        lhs_text, rhs_text = text.split(">=", 1)
        flip = True
    else:
        raise ExpressionError(f"constraint must contain '<=' or '>=': {text!r}")
    lhs = compile_expression(lhs_text, n_var)
    rhs = compile_expression(rhs_text, n_var)
    if flip:
        return lambda x: rhs(x) - lhs(x)
    return lambda x: lhs(x) - rhs(x)
