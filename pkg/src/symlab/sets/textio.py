"""Line-oriented set literals.

    rep=pointset dim=2
    point -1 0
    point 1 0

Records are ``point x y [z]``, ``interval a b``, ``cell i j [k]`` and, for
``rep=polygon``, ``point`` records listing vertices.  ``#`` starts a comment.
Dyadic values are written exactly, so dump/parse round-trips bit for bit.
"""

from __future__ import annotations

from pathlib import Path

from ..core import Dyadic
from .grid import GridSet
from .intervals import IntervalUnion
from .pointset import FinitePointSet
from .polygon import ConvexPolygon

_REPS = {"pointset", "intervals", "grid", "polygon"}


class SetFormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


def parse_set(text: str, *, snap: float | None = None, exact: bool = True):
    header = None
    records: list[tuple[int, str, list[str]]] = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            header = _parse_header(line, no)
            continue
        kw, *args = line.split()
        records.append((no, kw, args))
    if header is None:
        raise SetFormatError("missing header 'rep=... dim=...'")
    rep, n, h = header["rep"], header["dim"], header.get("h")
    want = {"pointset": "point", "polygon": "point", "intervals": "interval", "grid": "cell"}[rep]
    rows = []
    for no, kw, args in records:
        if kw != want:
            raise SetFormatError(f"record '{kw}' not allowed in rep={rep}", no)
        need = 2 if kw == "interval" else n
        if len(args) != need:
            raise SetFormatError(f"'{kw}' needs {need} values, got {len(args)}", no)
        try:
            rows.append([int(a) for a in args] if kw == "cell" else [Dyadic.parse(a) for a in args])
        except ValueError as exc:
            raise SetFormatError(str(exc), no) from None
    if not rows:
        raise SetFormatError("set literal has no records")
    if rep == "intervals":
        if n != 1:
            raise SetFormatError("rep=intervals requires dim=1")
        return IntervalUnion([tuple(r) for r in rows])
    if rep == "grid":
        return GridSet(rows, Dyadic.parse(h) if h else 1)
    if rep == "polygon":
        if n != 2:
            raise SetFormatError("rep=polygon requires dim=2")
        return ConvexPolygon.hull_of([[float(c) for c in r] for r in rows])
    if exact and snap is None:
        return FinitePointSet(rows, exact=True)
    return FinitePointSet([[float(c) for c in r] for r in rows], snap=snap)


def _parse_header(line: str, no: int) -> dict:
    fields = {}
    for tok in line.split():
        if "=" not in tok:
            raise SetFormatError(f"bad header token '{tok}'", no)
        k, v = tok.split("=", 1)
        fields[k] = v
    if fields.get("rep") not in _REPS:
        raise SetFormatError(f"rep must be one of {sorted(_REPS)}", no)
    try:
        fields["dim"] = int(fields["dim"])
    except (KeyError, ValueError):
        raise SetFormatError("header needs an integer dim", no) from None
    if not 1 <= fields["dim"] <= 3:
        raise SetFormatError("dim must be 1, 2 or 3", no)
    return fields


def dump_set(A) -> str:
    if isinstance(A, IntervalUnion):
        lines = ["rep=intervals dim=1"] + [f"interval {a} {b}" for a, b in A.intervals]
    elif isinstance(A, GridSet):
        lines = [f"rep=grid dim={A.ambient_dim} h={A.spacing}"]
        lines += ["cell " + " ".join(map(str, c)) for c in A.cells]
    elif isinstance(A, ConvexPolygon):
        lines = ["rep=polygon dim=2"]
        lines += ["point " + " ".join(repr(float(c)) for c in v) for v in A.vertices]
    elif isinstance(A, FinitePointSet):
        lines = [f"rep=pointset dim={A.ambient_dim}"]
        lines += ["point " + " ".join(str(c) if isinstance(c, Dyadic) else repr(c) for c in v)
                  for v in A.vectors()]
    else:
        raise TypeError(f"cannot serialize {type(A).__name__}")
    return "\n".join(lines) + "\n"


def load_set(path: str | Path, **kw):
    return parse_set(Path(path).read_text(), **kw)


def save_set(A, path: str | Path) -> None:
    Path(path).write_text(dump_set(A))
