"""Parser for the small polynomial grammar used in ring and module files.

A polynomial is a sum of signed terms.  A term is an optional integer
coefficient followed by variables, each with an optional ``^`` exponent;
``*`` between factors is optional and whitespace is ignored::

    x^2        x*y - z^2        3x^2y        -2 + x

Polynomials are returned as dictionaries mapping exponent tuples (one entry
per variable, in the order given) to integer coefficients.
"""

from __future__ import annotations

__all__ = ["ParseError", "parse_polynomial", "degree", "is_homogeneous"]


class ParseError(ValueError):
    """Malformed polynomial text or spec file."""


def _tokenize(text: str, names: list[str]):
    # variable names may run together ("xy"), so match the longest known
    # name at each position instead of a generic identifier
    by_len = sorted(names, key=len, reverse=True)
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("num", int(text[i:j])))
            i = j
        elif ch in "+-":
            toks.append(("sign", ch))
            i += 1
        elif ch == "^":
            toks.append(("pow", ch))
            i += 1
        elif ch == "*":
            toks.append(("mul", ch))
            i += 1
        else:
            for name in by_len:
                if text.startswith(name, i):
                    toks.append(("var", name))
                    i += len(name)
                    break
            else:
                raise ParseError(f"unexpected {text[i:i + 8]!r} in {text!r}")
    return toks


def parse_polynomial(text: str, names: list[str]) -> dict[tuple[int, ...], int]:
    """Parse ``text`` into ``{exponents: coefficient}`` over ``names``."""
    if not isinstance(text, str):
        raise ParseError(f"polynomial must be a string, got {type(text).__name__}")
    index = {v: k for k, v in enumerate(names)}
    toks = _tokenize(text, names)
    if not toks:
        raise ParseError("empty polynomial")
    poly: dict[tuple[int, ...], int] = {}
    pos = 0
    first = True
    while pos < len(toks):
        sign = 1
        if toks[pos][0] == "sign":
            sign = -1 if toks[pos][1] == "-" else 1
            pos += 1
        elif not first:
            raise ParseError(f"expected + or - in {text!r}")
        first = False
        coeff = None
        exps = [0] * len(names)
        seen_factor = False
        if pos < len(toks) and toks[pos][0] == "num":
            coeff = toks[pos][1]
            pos += 1
            seen_factor = True
        while pos < len(toks) and toks[pos][0] in ("var", "mul"):
            if toks[pos][0] == "mul":
                if not seen_factor:
                    raise ParseError(f"dangling '*' in {text!r}")
                pos += 1
                if pos >= len(toks) or toks[pos][0] != "var":
                    raise ParseError(f"'*' must be followed by a variable in {text!r}")
            name = toks[pos][1]
            pos += 1
            e = 1
            if pos < len(toks) and toks[pos][0] == "pow":
                pos += 1
                if pos >= len(toks) or toks[pos][0] != "num" or toks[pos][1] < 1:
                    raise ParseError(f"bad exponent in {text!r}")
                e = toks[pos][1]
                pos += 1
            exps[index[name]] += e
            seen_factor = True
        if not seen_factor:
            raise ParseError(f"missing term in {text!r}")
        key = tuple(exps)
        poly[key] = poly.get(key, 0) + sign * (1 if coeff is None else coeff)
    return {k: c for k, c in poly.items() if c != 0}


def degree(mono: tuple[int, ...]) -> int:
    return sum(mono)


def is_homogeneous(poly: dict) -> bool:
    return len({sum(m) for m in poly}) <= 1
