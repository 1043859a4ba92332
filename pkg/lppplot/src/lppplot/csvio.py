"""Strict parsing of the simulation CSV schema.

Tail curves: ``#meta key=value`` lines, the exact header
``threshold,n_samples,n_exceed,p_hat,ci_lo,ci_hi``, data rows, then optional
``#fit`` / ``#fit_model`` / ``#fit_excluded`` comment lines.  Variance
tables use the header ``N,n_samples,var_hat,jk_se``.  Anything else is
rejected with a :class:`SchemaError` carrying the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class SchemaError(ValueError):
    def __init__(self, path, lineno: int | None, message: str):
        self.path = path
        self.lineno = lineno
        where = f"{path}:{lineno}" if lineno is not None else str(path)
        super().__init__(f"{where}: {message}")


TAIL_HEADER = "threshold,n_samples,n_exceed,p_hat,ci_lo,ci_hi"
VARIANCE_HEADER = "N,n_samples,var_hat,jk_se"


@dataclass
class TailRow:
    threshold: float
    n_samples: int
    n_exceed: int
    p_hat: float
    ci_lo: float
    ci_hi: float


@dataclass
class VarianceRow:
    n: int
    n_samples: int
    var_hat: float
    jk_se: float


@dataclass
class TailCurveFile:
    path: str
    meta: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    fit: dict = field(default_factory=dict)          # merged #fit key=value pairs
    fit_models: list = field(default_factory=list)   # one dict per #fit_model line

    @property
    def label(self) -> str:
        kind = self.meta.get("kind", "tail")
        rho = self.meta.get("rho")
        n = self.meta.get("n")
        bits = [kind]
        if rho:
            bits.append(f"rho={rho}")
        if n:
            bits.append(f"n={n}")
        return " ".join(bits)


@dataclass
class VarianceFile:
    path: str
    meta: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    fit: dict = field(default_factory=dict)


def _parse_kv(path, lineno, text, out):
    for part in text.split(" "):
        if not part:
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise SchemaError(path, lineno, f"expected key=value in comment, got {part!r}")
        out[key] = value


def _float(path, lineno, text, what):
    try:
        return float(text)
    except ValueError:
        raise SchemaError(path, lineno, f"bad {what}: {text!r}") from None


def _int(path, lineno, text, what):
    try:
        return int(text)
    except ValueError:
        raise SchemaError(path, lineno, f"bad {what}: {text!r}") from None


def read_tail_file(path) -> TailCurveFile:
    out = TailCurveFile(path=str(path))
    header_seen = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#meta "):
                _parse_kv(path, lineno, line[len("#meta ") :], out.meta)
            elif line.startswith("#fit_model "):
                model: dict = {}
                _parse_kv(path, lineno, line[len("#fit_model ") :], model)
                out.fit_models.append(model)
            elif line.startswith("#fit_excluded "):
                continue
            elif line.startswith("#fit "):
                _parse_kv(path, lineno, line[len("#fit ") :], out.fit)
            elif line.startswith("#"):
                raise SchemaError(path, lineno, f"unknown comment {line.split(' ')[0]!r}")
            elif not header_seen:
                if line != TAIL_HEADER:
                    raise SchemaError(path, lineno, f"expected header {TAIL_HEADER!r}, got {line!r}")
                header_seen = True
            else:
                parts = line.split(",")
                if len(parts) != 6:
                    raise SchemaError(path, lineno, f"expected 6 columns, got {len(parts)}")
                out.rows.append(
                    TailRow(
                        threshold=_float(path, lineno, parts[0], "threshold"),
                        n_samples=_int(path, lineno, parts[1], "n_samples"),
                        n_exceed=_int(path, lineno, parts[2], "n_exceed"),
                        p_hat=_float(path, lineno, parts[3], "p_hat"),
                        ci_lo=_float(path, lineno, parts[4], "ci_lo"),
                        ci_hi=_float(path, lineno, parts[5], "ci_hi"),
                    )
                )
    if not header_seen:
        raise SchemaError(path, None, "no header line found")
    if not out.rows:
        raise SchemaError(path, None, "no data rows")
    return out


def read_variance_file(path) -> VarianceFile:
    out = VarianceFile(path=str(path))
    header_seen = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#meta "):
                _parse_kv(path, lineno, line[len("#meta ") :], out.meta)
            elif line.startswith("#fit "):
                _parse_kv(path, lineno, line[len("#fit ") :], out.fit)
            elif line.startswith("#"):
                raise SchemaError(path, lineno, f"unknown comment {line.split(' ')[0]!r}")
            elif not header_seen:
                if line != VARIANCE_HEADER:
                    raise SchemaError(
                        path, lineno, f"expected header {VARIANCE_HEADER!r}, got {line!r}"
                    )
                header_seen = True
            else:
                parts = line.split(",")
                if len(parts) != 4:
                    raise SchemaError(path, lineno, f"expected 4 columns, got {len(parts)}")
                out.rows.append(
                    VarianceRow(
                        n=_int(path, lineno, parts[0], "N"),
                        n_samples=_int(path, lineno, parts[1], "n_samples"),
                        var_hat=_float(path, lineno, parts[2], "var_hat"),
                        jk_se=_float(path, lineno, parts[3], "jk_se"),
                    )
                )
    if not header_seen:
        raise SchemaError(path, None, "no header line found")
    if not out.rows:
        raise SchemaError(path, None, "no data rows")
    return out
