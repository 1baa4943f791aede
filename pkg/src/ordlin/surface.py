"""Concrete syntax: a small lexer, recursive-descent parsers for types and
programs, and a pretty printer forming a round-trip pair with the parser.

File extensions: .ord (core dialect) and .afn (affine dialect).  Comments run
from `--` to the end of the line.
"""

from __future__ import annotations

import dataclasses
from typing import Optional

from . import syntax as S


class SurfaceError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


KEYWORDS = {
    "new", "delete", "let", "in", "fun", "match", "inl", "inr", "fst", "snd",
    "drop", "raise", "move", "try", "unless",
}

AFFINE_KEYWORDS = {"drop", "raise", "move", "try", "unless"}

_SYMBOLS = ["<-", "->", "-o", "(", ")", "<", ">", ",", ";", ":", "{", "}",
            "|", "=", "*", "+", "&", "#"]


@dataclasses.dataclass(frozen=True)
class Token:
    kind: str  # "ident", "keyword", "number", "symbol", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            toks.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("number", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("symbol", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise SurfaceError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, toks: list[Token], dialect: str):
        self.toks = toks
        self.pos = 0
        self.dialect = dialect

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise SurfaceError(msg, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "eof":
            self.error(f"expected {text!r}, found {t.text!r}")
        return self.next()

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != "eof"

    def expect_ident(self) -> str:
        t = self.peek()
        if t.kind != "ident":
            self.error(f"expected an identifier, found {t.text!r}")
        return self.next().text

    def affine_only(self, tok: Token):
        if self.dialect != "affine":
            self.error(f"{tok.text!r} is only available in the affine dialect",
                       tok)

    ## Types

    def type_(self) -> S.Type:
        left = self.type_with()
        if self.at("-o"):
            self.next()
            return S.LArrow(left, self.type_())
        return left

    def type_with(self) -> S.Type:
        t = self.type_sum()
        while self.at("&"):
            self.next()
            t = S.With(t, self.type_sum())
        return t

    def type_sum(self) -> S.Type:
        t = self.type_tensor()
        while self.at("+"):
            self.next()
            t = S.Sum(t, self.type_tensor())
        return t

    def type_tensor(self) -> S.Type:
        t = self.type_atom()
        while self.at("*"):
            self.next()
            t = S.Tensor(t, self.type_atom())
        return t

    def type_atom(self) -> S.Type:
        t = self.peek()
        if t.text == "R":
            self.next()
            return S.RES
        if t.text == "1":
            self.next()
            return S.UNIT
        if t.text == "(":
            self.next()
            inner = self.type_()
            self.expect(")")
            return inner
        self.error(f"expected a type, found {t.text!r}")

    ## Terms

    def expr(self) -> S.Expr:
        e = self.seq()
        if self.at(":"):
            self.next()
            return S.Ascribe(e, self.type_())
        return e

    def seq(self) -> S.Expr:
        parts = [self.item()]
        while self.at(";"):
            self.next()
            parts.append(self.item())
        e = parts[-1]
        for p in reversed(parts[:-1]):
            e = S.Seq(p, e)
        return e

    def item(self) -> S.Expr:
        t = self.peek()
        if t.text == "let":
            self.next()
            x = self.expect_ident()
            ascription = None
            if self.at(":"):
                self.next()
                ascription = self.type_()
            self.expect("=")
            bound = self.expr()
            if ascription is not None:
                bound = S.Ascribe(bound, ascription)
            self.expect("in")
            return S.Let(x, bound, self.item_seq())
        if t.text == "fun":
            self.next()
            if self.at("("):
                self.next()
                x = self.expect_ident()
                self.expect(":")
                ty = self.type_()
                self.expect(")")
                self.expect("->")
                return S.Lam(x, self.item_seq(), binder_ty=ty)
            x = self.expect_ident()
            self.expect("->")
            return S.Lam(x, self.item_seq())
        if t.text == "match":
            self.next()
            scrut = self.expr()
            self.expect("{")
            e = self.match_arms(scrut)
            self.expect("}")
            return e
        if t.text == "move":
            self.affine_only(t)
            self.next()
            self.expect("(")
            x = self.expect_ident()
            self.expect(",")
            y = self.expect_ident()
            self.expect(")")
            self.expect("in")
            return S.MoveIn(x, y, self.item_seq())
        if t.text == "try":
            self.affine_only(t)
            self.next()
            x = self.expect_ident()
            self.expect("<-")
            bound = self.expr()
            self.expect("in")
            body = self.item_seq()
            self.expect("unless")
            e = self.expect_ident()
            self.expect("->")
            handler = self.item_seq()
            return S.TryIn(x, bound, body, e, handler)
        return self.app()

    def item_seq(self) -> S.Expr:
        # a control-form body extends across `;` as far right as possible
        parts = [self.item()]
        while self.at(";"):
            self.next()
            parts.append(self.item())
        e = parts[-1]
        for p in reversed(parts[:-1]):
            e = S.Seq(p, e)
        return e

    def match_arms(self, scrut: S.Expr) -> S.Expr:
        t = self.peek()
        if t.text == "(":
            self.next()
            if self.at(")"):
                self.next()
                self.expect("->")
                return S.MatchUnit(scrut, self.expr())
            x = self.expect_ident()
            self.expect(",")
            y = self.expect_ident()
            self.expect(")")
            self.expect("->")
            return S.MatchPair(scrut, x, y, self.expr())
        if t.text in ("inl", "inr"):
            first = self.next().text
            x = self.expect_ident()
            self.expect("->")
            body1 = self.expr()
            self.expect("|")
            second = self.next().text
            if {first, second} != {"inl", "inr"}:
                self.error("match arms must cover inl and inr")
            y = self.expect_ident()
            self.expect("->")
            body2 = self.expr()
            if first == "inl":
                return S.MatchSum(scrut, x, body1, y, body2)
            return S.MatchSum(scrut, y, body2, x, body1)
        self.error(f"expected a match pattern, found {t.text!r}")

    def app(self) -> S.Expr:
        e = self.atom()
        while self.starts_atom():
            e = S.App(e, self.atom())
        return e

    def starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("ident", "number"):
            return t.kind == "ident"
        if t.kind == "keyword":
            return t.text in ("new", "delete", "drop", "raise", "inl", "inr",
                              "fst", "snd")
        return t.text in ("(", "<", "#")

    def atom(self) -> S.Expr:
        t = self.peek()
        if t.kind == "ident":
            self.next()
            return S.Var(t.text)
        if t.text == "new":
            self.next()
            return S.NewConst()
        if t.text == "delete":
            self.next()
            return S.DeleteConst()
        if t.text == "drop":
            self.affine_only(t)
            self.next()
            return S.DropConst()
        if t.text == "raise":
            self.affine_only(t)
            self.next()
            return S.RaiseConst()
        if t.text == "inl":
            self.next()
            return S.Inj(1, self.atom())
        if t.text == "inr":
            self.next()
            return S.Inj(2, self.atom())
        if t.text == "fst":
            self.next()
            return S.Proj(1, self.atom())
        if t.text == "snd":
            self.next()
            return S.Proj(2, self.atom())
        if t.text == "#":
            self.next()
            num = self.peek()
            if num.kind != "number":
                self.error("expected a resource index after '#'")
            self.next()
            return S.ResLit(int(num.text))
        if t.text == "(":
            self.next()
            if self.at(")"):
                self.next()
                return S.UnitVal()
            first = self.expr()
            if self.at(","):
                self.next()
                second = self.expr()
                self.expect(")")
                return S.Pair(first, second)
            self.expect(")")
            return first
        if t.text == "<":
            self.next()
            first = self.expr()
            self.expect(",")
            second = self.expr()
            self.expect(">")
            return S.LazyPair(first, second)
        self.error(f"expected an expression, found {t.text!r}")


def parse_type(text: str) -> S.Type:
    p = _Parser(tokenize(text), "core")
    t = p.type_()
    if p.peek().kind != "eof":
        p.error("trailing input after type")
    return t


def parse_program(text: str, dialect: str = "core", desugar: bool = True) -> S.Expr:
    """Parse a program in the given dialect ("core" or "affine").

    By default the result is desugared and alpha-freshened.
    """
    if dialect not in ("core", "affine"):
        raise ValueError(f"unknown dialect {dialect!r}")
    p = _Parser(tokenize(text), dialect)
    e = p.expr()
    if p.peek().kind != "eof":
        p.error(f"trailing input: {p.peek().text!r}")
    if desugar:
        e = S.alpha_freshen(S.desugar(e))
    return e


### Pretty printer

_LOW, _APP, _ATOM = 0, 1, 2


def pretty_print_type(t: S.Type, prec: int = 0) -> str:
    # precedence: * (3) > + (2) > & (1) > -o (0, right associative)
    if isinstance(t, S.Res):
        return "R"
    if isinstance(t, S.Unit):
        return "1"
    if isinstance(t, S.LArrow):
        s = f"{pretty_print_type(t.domain, 1)} -o {pretty_print_type(t.codomain, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(t, S.With):
        s = f"{pretty_print_type(t.left, 1)} & {pretty_print_type(t.right, 2)}"
        return f"({s})" if prec > 1 else s
    if isinstance(t, S.Sum):
        s = f"{pretty_print_type(t.left, 2)} + {pretty_print_type(t.right, 3)}"
        return f"({s})" if prec > 2 else s
    if isinstance(t, S.Tensor):
        s = f"{pretty_print_type(t.left, 3)} * {pretty_print_type(t.right, 4)}"
        return f"({s})" if prec > 3 else s
    raise TypeError(f"not a type: {t!r}")


def pretty_print(e: S.Expr, prec: int = _LOW) -> str:
    def paren(s: str, needed: bool) -> str:
        return f"({s})" if needed else s

    if isinstance(e, S.Var):
        return e.name
    if isinstance(e, S.ResLit):
        return f"#{e.index}"
    if isinstance(e, S.UnitVal):
        return "()"
    if isinstance(e, S.NewConst):
        return "new"
    if isinstance(e, S.DeleteConst):
        return "delete"
    if isinstance(e, S.DropConst):
        return "drop"
    if isinstance(e, S.RaiseConst):
        return "raise"
    if isinstance(e, S.Pair):
        return f"({pretty_print(e.fst)}, {pretty_print(e.snd)})"
    if isinstance(e, S.LazyPair):
        return f"<{pretty_print(e.fst)}, {pretty_print(e.snd)}>"
    if isinstance(e, S.Inj):
        word = "inl" if e.tag == 1 else "inr"
        return paren(f"{word} {pretty_print(e.value, _ATOM)}", prec > _APP)
    if isinstance(e, S.Proj):
        word = "fst" if e.tag == 1 else "snd"
        return paren(f"{word} {pretty_print(e.value, _ATOM)}", prec > _APP)
    if isinstance(e, S.App):
        s = f"{pretty_print(e.fn, _APP)} {pretty_print(e.arg, _ATOM)}"
        return paren(s, prec > _APP)
    if isinstance(e, S.Lam):
        if e.binder_ty is not None:
            head = f"fun ({e.binder} : {pretty_print_type(e.binder_ty)})"
        else:
            head = f"fun {e.binder}"
        return paren(f"{head} -> {pretty_print(e.body)}", prec > _LOW)
    if isinstance(e, S.Let):
        if isinstance(e.bound, S.Ascribe):
            s = (f"let {e.binder} : {pretty_print_type(e.bound.ty_ann)}"
                 f" = {pretty_print(e.bound.expr)} in {pretty_print(e.body)}")
        else:
            s = f"let {e.binder} = {pretty_print(e.bound)} in {pretty_print(e.body)}"
        return paren(s, prec > _LOW)
    if isinstance(e, S.MatchPair):
        s = (f"match {pretty_print(e.scrut, _ATOM)}"
             f" {{ ({e.binder1}, {e.binder2}) -> {pretty_print(e.body)} }}")
        return paren(s, prec > _APP)
    if isinstance(e, S.MatchUnit):
        s = f"match {pretty_print(e.scrut, _ATOM)} {{ () -> {pretty_print(e.body)} }}"
        return paren(s, prec > _APP)
    if isinstance(e, S.MatchSum):
        s = (f"match {pretty_print(e.scrut, _ATOM)}"
             f" {{ inl {e.binder1} -> {pretty_print(e.body1)}"
             f" | inr {e.binder2} -> {pretty_print(e.body2)} }}")
        return paren(s, prec > _APP)
    if isinstance(e, S.Ascribe):
        return f"({pretty_print(e.expr)} : {pretty_print_type(e.ty_ann)})"
    if isinstance(e, S.MoveIn):
        s = f"move ({e.var1}, {e.var2}) in {pretty_print(e.body)}"
        return paren(s, prec > _LOW)
    if isinstance(e, S.TryIn):
        s = (f"try {e.binder} <- {pretty_print(e.bound)} in {pretty_print(e.body)}"
             f" unless {e.exc_binder} -> {pretty_print(e.handler)}")
        return paren(s, prec > _LOW)
    if isinstance(e, S.Coerce):
        return pretty_print(e.value, prec)
    if isinstance(e, S.Seq):
        s = f"{pretty_print(e.first, _APP)} ; {pretty_print(e.second)}"
        return paren(s, prec > _LOW)
    raise TypeError(f"not an expression: {e!r}")
