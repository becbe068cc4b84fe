"""Dossier file format: UTF-8 text, [section] headers, key = value lines.

Values: integers, rationals p/q, tower elements [c0,c1,c2,c3,c4,c5]
(basis 1, th, th^2, z, z*th, z*th^2), p-adic literals padic(p,v,u,k)
meaning p^v*u with k digits of relative precision, points (x, y), and
comma lists of integers.  Sections: [curve] (a1..a6, s, t, optional
bad_primes), [isogeny] (case, n, t_torsion, dim_s_phi, optional
selmer_dim), [selmer] (gen.i), [lift i] (xi or b), [local p] (zeta3,
theta, precision, point.i).  '#' starts a comment.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import DossierError
from .lifts import Curve
from .localfields import PadicNumber
from .pairing import Dossier, LocalBlock
from .tower import Tower

_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")
_PADIC = re.compile(r"^padic\(\s*(\d+)\s*,\s*(-?\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")


def _parse_rational(tok: str, line: int) -> Fraction:
    tok = tok.strip()
    if not _RAT.match(tok):
        raise DossierError(f"expected a rational, got {tok!r}", line)
    return Fraction(tok)


def _split_top(s: str, sep: str = ",") -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    return out


def _parse_element(tok: str, tower: Tower, line: int):
    tok = tok.strip()
    if tok.startswith("["):
        if not tok.endswith("]"):
            raise DossierError("unterminated tower element", line)
        parts = _split_top(tok[1:-1])
        if len(parts) != 6:
            raise DossierError("tower elements need six coordinates", line)
        return tower.element([_parse_rational(p, line) for p in parts])
    return tower.rational(_parse_rational(tok, line))


def _parse_value(tok: str, line: int):
    tok = tok.strip()
    m = _PADIC.match(tok)
    if m:
        p, v, u, k = (int(m.group(i)) for i in range(1, 5))
        if u % p == 0:
            raise DossierError("padic literal unit must be coprime to p", line)
        return PadicNumber(p, v, u % p**k, k)
    return _parse_rational(tok, line)


def _parse_point(tok: str, line: int):
    tok = tok.strip()
    if not (tok.startswith("(") and tok.endswith(")")):
        raise DossierError("points look like (x, y)", line)
    parts = _split_top(tok[1:-1])
    if len(parts) != 2:
        raise DossierError("points have two coordinates", line)
    x = _parse_rational(parts[0], line)
    y = _parse_value(parts[1], line)
    return x, y


def parse_dossier(text: str) -> Dossier:
    sections: dict[str, dict] = {}
    order: list[str] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        src = raw.split("#", 1)[0].strip()
        if not src:
            continue
        if src.startswith("["):
            if not src.endswith("]"):
                raise DossierError("unterminated section header", lineno)
            current = src[1:-1].strip().lower()
            sections.setdefault(current, {})
            order.append(current)
            continue
        if current is None:
            raise DossierError("key outside any section", lineno)
        if "=" not in src:
            raise DossierError("expected key = value", lineno)
        key, val = src.split("=", 1)
        sections[current][key.strip().lower()] = (val.strip(), lineno)

    def need(section: str, key: str):
        if section not in sections or key not in sections[section]:
            raise DossierError(f"missing {key} in [{section}]")
        return sections[section][key]

    iso = sections.get("isogeny")
    if iso is None:
        raise DossierError("missing [isogeny] section")
    case = need("isogeny", "case")[0].lower()
    n_tok, n_line = need("isogeny", "n")
    n = int(_parse_rational(n_tok, n_line))
    tower = Tower(n)

    cur = sections.get("curve")
    if cur is None:
        raise DossierError("missing [curve] section")
    coeffs = {}
    for key in ("a1", "a2", "a3", "a4", "a6"):
        tok, line = cur.get(key, ("0", 0))
        coeffs[key] = _parse_rational(tok, line)
    curve = Curve.make(**coeffs)

    def parse_pt_of_elements(tok, line):
        tok = tok.strip()
        if not (tok.startswith("(") and tok.endswith(")")):
            raise DossierError("torsion points look like (x, y)", line)
        parts = _split_top(tok[1:-1])
        if len(parts) != 2:
            raise DossierError("torsion points have two coordinates", line)
        return (
            _parse_element(parts[0], tower, line),
            _parse_element(parts[1], tower, line),
        )

    s_tok, s_line = need("curve", "s")
    t_tok, t_line = need("curve", "t")
    torsion_s = parse_pt_of_elements(s_tok, s_line)
    torsion_t = parse_pt_of_elements(t_tok, t_line)
    bad = None
    if "bad_primes" in cur:
        tok, line = cur["bad_primes"]
        bad = [int(_parse_rational(t, line)) for t in _split_top(tok)]

    sel = sections.get("selmer")
    if not sel:
        raise DossierError("missing [selmer] section")
    gens = []
    idx = 1
    while f"gen.{idx}" in sel:
        tok, line = sel[f"gen.{idx}"]
        gens.append(_parse_element(tok, tower, line))
        idx += 1
    if not gens:
        raise DossierError("no generators in [selmer]")

    t_tok, t_line = need("isogeny", "t_torsion")
    t_corr = int(_parse_rational(t_tok, t_line))
    dim_tok, dim_line = need("isogeny", "dim_s_phi")
    dim_s_phi = int(_parse_rational(dim_tok, dim_line))
    selmer_dim = None
    if "selmer_dim" in iso:
        tok, line = iso["selmer_dim"]
        selmer_dim = int(_parse_rational(tok, line))

    lift_xi, lift_b = {}, {}
    blocks = {}
    for name in sections:
        m = re.match(r"^lift\s+(\d+)$", name)
        if m:
            i = int(m.group(1)) - 1
            if not 0 <= i < len(gens):
                raise DossierError(f"[{name}] refers to an unknown generator")
            body = sections[name]
            if "xi" in body:
                tok, line = body["xi"]
                lift_xi[i] = _parse_element(tok, tower, line)
            if "b" in body:
                tok, line = body["b"]
                lift_b[i] = _parse_element(tok, tower, line)
            continue
        m = re.match(r"^local\s+(\d+)$", name)
        if m:
            p = int(m.group(1))
            body = sections[name]
            block = LocalBlock(p)
            if "zeta3" in body:
                tok, line = body["zeta3"]
                block.zeta_seed = int(_parse_rational(tok, line))
            if "theta" in body:
                tok, line = body["theta"]
                block.theta_seed = int(_parse_rational(tok, line))
            if "precision" in body:
                tok, line = body["precision"]
                block.precision = int(_parse_rational(tok, line))
            for key, (tok, line) in body.items():
                pm = re.match(r"^point\.(\d+)$", key)
                if pm:
                    gi = int(pm.group(1)) - 1
                    if not 0 <= gi < len(gens):
                        raise DossierError(f"point for unknown generator", line)
                    block.points[gi] = _parse_point(tok, line)
            blocks[p] = block

    return Dossier(
        curve=curve,
        case=case,
        n=n,
        tower=tower,
        torsion_s=torsion_s,
        torsion_t=torsion_t,
        generators=gens,
        lift_xi=lift_xi,
        lift_b=lift_b,
        t_corr=t_corr,
        dim_s_phi=dim_s_phi,
        selmer_dim=selmer_dim,
        blocks=blocks,
        bad_primes=bad,
    )


def load_dossier(path) -> Dossier:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dossier(fh.read())
