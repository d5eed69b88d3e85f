"""Run configurations: a sectioned ``key = value`` text format.

Example::

    [problem]
    lambda0 = 1
    lambda = 1
    Q = 1, -1
    Q = 0, 1
    r = 1, 1
    vortex1 = -0.5+0i
    vortex2 = 0+0i

    [grid]
    n = 128

Complex numbers are written ``re+imi``; list-valued keys (``Q``,
``vortexN``, ``impurity_delta``, ``boundaryN``) may repeat. Lines starting
with ``#`` or ``;`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np

from .charges import ChargeData
from .errors import ConfigError
from .holomorphic import HoloMap
from .solver import ImpuritySpec, ProblemSpec, SolverConfig
from .surface import Surface

FAMILIES: dict[str, tuple[int, int] | None] = {
    "single-field": None,
    "taubes": (1, 1),
    "popov": (-1, -1),
    "jackiw-pi": (0, -1),
    "ambjorn-olesen": (1, -1),
    "bradlow": (1, 0),
    "impurity": None,
    "toda": None,
}

_COMPLEX_RE = re.compile(
    r"""^\s*(?P<re>[+-]?(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|inf|nan))
        (?:\s*(?P<im>[+-]\s*(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|inf|nan))i)?\s*$""",
    re.VERBOSE,
)


def format_complex(z: complex) -> str:
    z = complex(z)
    im = repr(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{z.real!r}{sign}{im}i"


def parse_complex(text: str) -> complex:
    text = text.strip()
    m = _COMPLEX_RE.match(text)
    if m is None:
        # a bare imaginary part such as "1i" or "-2.5i"
        if text.endswith("i"):
            try:
                return complex(0.0, float(text[:-1]))
            except ValueError:
                pass
        raise ValueError(f"not a complex number: {text!r}")
    re_part = float(m.group("re"))
    im_part = float(m.group("im").replace(" ", "")) if m.group("im") else 0.0
    return complex(re_part, im_part)


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs; ``parse(serialize(c)) == c``."""

    family: str | None = None
    lambda0: int = 1
    lam: int = 1
    radius: float | None = None
    constant_sign: int | None = None
    charges: tuple[tuple[float, ...], ...] = ((1.0,),)
    fi: tuple[float, ...] = (1.0,)
    vortices: tuple[tuple[complex, ...], ...] = ((),)
    boundary: tuple[str, ...] = ()
    impurity: str = "none"
    impurity_value: float = 0.0
    impurity_deltas: tuple[tuple[complex, float], ...] = ()
    f: tuple[complex, ...] | None = None
    f_den: tuple[complex, ...] = (1 + 0j,)
    f1: tuple[complex, ...] | None = None
    f2: tuple[complex, ...] | None = None
    ftilde: tuple[complex, ...] = (1 + 0j,)
    alpha: float | None = None
    grid_n: int = 128
    tol: float = 1e-10
    max_iter: int = 50
    damping: float = 1.0
    out_dir: str | None = None
    residual_tol: float | None = None
    flux_tol: float | None = None
    compare_a: str | None = None
    compare_b: str | None = None
    compare_region: str = "all-interior"
    compare_columns: tuple[str, ...] = ()

    # -- derived objects ------------------------------------------------------
    @property
    def n_flavors(self) -> int:
        return len(self.charges)

    def signs(self) -> tuple[int, int]:
        """(lambda0, lambda) after applying a named family."""
        fixed = FAMILIES.get(self.family or "", None)
        return fixed if fixed is not None else (self.lambda0, self.lam)

    def surface(self) -> Surface:
        return Surface(self.signs()[0], self.radius)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(tol=self.tol, max_iter=self.max_iter, damping=self.damping)

    def holomap(self) -> HoloMap:
        if self.f is None:
            raise ConfigError("[map] f is required for this family")
        return HoloMap(self.f, self.f_den)

    def problem_spec(self) -> ProblemSpec:
        l0, lam = self.signs()
        F = self.n_flavors
        if len(self.vortices) != F:
            raise ConfigError(f"[problem] vortex lists ({len(self.vortices)}) do not match Q rows ({F})")
        if self.impurity == "none":
            imp = ImpuritySpec.none()
        elif self.impurity == "constant":
            imp = ImpuritySpec.constant(self.impurity_value)
        elif self.impurity == "delta":
            imp = ImpuritySpec.delta(self.impurity_deltas)
        else:
            raise ConfigError(f"[problem] impurity: unknown kind {self.impurity!r}")
        if self.boundary:
            if len(self.boundary) != F:
                raise ConfigError("[problem] need one boundaryN entry per flavor")
            bnd: Any = tuple(b if b == "vacuum" else float(b) for b in self.boundary)
        else:
            bnd = "vacuum"
        return ProblemSpec(
            surface=Surface(l0, self.radius),
            lam=lam,
            charges=ChargeData(self.charges, self.fi),
            vortices=self.vortices,
            impurity=imp,
            grid_n=self.grid_n,
            boundary=bnd,
            lambda0=self.constant_sign,
        )


# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------

# key -> (section, field name, kind); kinds: str, int, float, opt_int, opt_float,
# opt_str, clist (complex list), flist (float list), repeated kinds handled apart
_SCALARS: dict[tuple[str, str], tuple[str, str]] = {
    ("problem", "family"): ("family", "opt_str"),
    ("problem", "lambda0"): ("lambda0", "int"),
    ("problem", "lambda"): ("lam", "int"),
    ("problem", "radius"): ("radius", "opt_float"),
    ("problem", "constant_sign"): ("constant_sign", "opt_int"),
    ("problem", "r"): ("fi", "flist"),
    ("problem", "impurity"): ("impurity", "str"),
    ("problem", "impurity_value"): ("impurity_value", "float"),
    ("map", "f"): ("f", "opt_clist"),
    ("map", "f_den"): ("f_den", "clist"),
    ("map", "f1"): ("f1", "opt_clist"),
    ("map", "f2"): ("f2", "opt_clist"),
    ("map", "ftilde"): ("ftilde", "clist"),
    ("map", "alpha"): ("alpha", "opt_float"),
    ("grid", "n"): ("grid_n", "int"),
    ("solver", "tol"): ("tol", "float"),
    ("solver", "max_iter"): ("max_iter", "int"),
    ("solver", "damping"): ("damping", "float"),
    ("output", "dir"): ("out_dir", "opt_str"),
    ("verify", "residual_tol"): ("residual_tol", "opt_float"),
    ("verify", "flux_tol"): ("flux_tol", "opt_float"),
    ("compare", "a"): ("compare_a", "opt_str"),
    ("compare", "b"): ("compare_b", "opt_str"),
    ("compare", "region"): ("compare_region", "str"),
    ("compare", "columns"): ("compare_columns", "slist"),
}
_SECTIONS = ("problem", "map", "grid", "solver", "output", "verify", "compare")
_INDEXED = re.compile(r"^(vortex|boundary)(\d+)$")


def _split(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    return [] if parts == [""] else parts


def _convert(kind: str, text: str) -> Any:
    if kind in ("str", "opt_str"):
        return text
    if kind in ("int", "opt_int"):
        return int(text)
    if kind in ("float", "opt_float"):
        return float(text)
    if kind in ("clist", "opt_clist"):
        return tuple(parse_complex(p) for p in _split(text))
    if kind == "flist":
        return tuple(float(p) for p in _split(text))
    if kind == "slist":
        return tuple(_split(text))
    raise AssertionError(kind)


def _render(kind: str, value: Any) -> str:
    if kind in ("str", "opt_str"):
        return str(value)
    if kind in ("int", "opt_int"):
        return str(int(value))
    if kind in ("float", "opt_float"):
        return repr(float(value))
    if kind in ("clist", "opt_clist"):
        return ", ".join(format_complex(c) for c in value)
    if kind == "flist":
        return ", ".join(repr(float(x)) for x in value)
    if kind == "slist":
        return ", ".join(value)
    raise AssertionError(kind)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse config text; errors name the line and key."""
    values: dict[str, Any] = {}
    rows: list[tuple[float, ...]] = []
    vort: dict[int, list[complex]] = {}
    bnd: dict[int, str] = {}
    deltas: list[tuple[complex, float]] = []
    section: str | None = None
    seen: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        where = f"{source}:{lineno}"
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{where}: malformed section header {line!r}")
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"{where}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {line!r}")
        if section is None:
            raise ConfigError(f"{where}: key outside any section")
        key, _, val = (s.strip() for s in line.partition("="))
        try:
            if section == "problem" and key == "Q":
                rows.append(tuple(float(p) for p in _split(val)))
                continue
            if section == "problem" and key == "impurity_delta":
                parts = _split(val)
                if len(parts) != 2:
                    raise ValueError("expected 'position, strength'")
                deltas.append((parse_complex(parts[0]), float(parts[1])))
                continue
            m = _INDEXED.match(key)
            if section == "problem" and m:
                idx = int(m.group(2))
                if idx < 1:
                    raise ValueError("flavor indices start at 1")
                if m.group(1) == "vortex":
                    vort.setdefault(idx, []).extend(parse_complex(p) for p in _split(val))
                else:
                    if idx in bnd:
                        raise ValueError("duplicate key")
                    if val != "vacuum":
                        float(val)
                    bnd[idx] = val
                continue
            spec = _SCALARS.get((section, key))
            if spec is None:
                raise ValueError("unknown key")
            if (section, key) in seen:
                raise ValueError("duplicate key")
            seen.add((section, key))
            name, kind = spec
            values[name] = _convert(kind, val)
        except ValueError as exc:
            raise ConfigError(f"{where}: [{section}] {key}: {exc}") from None
    if rows:
        if len({len(r) for r in rows}) != 1:
            raise ConfigError(f"{source}: [problem] Q rows have different lengths")
        values["charges"] = tuple(rows)
    F = len(values.get("charges", RunConfig.charges))
    for store, name in ((vort, "vortex"), (bnd, "boundary")):
        bad = [i for i in store if i > F]
        if bad:
            raise ConfigError(f"{source}: [problem] {name}{bad[0]} refers to a flavor beyond Q ({F} rows)")
    values["vortices"] = tuple(tuple(vort.get(A, ())) for A in range(1, F + 1))
    if bnd:
        if sorted(bnd) != list(range(1, F + 1)):
            raise ConfigError(f"{source}: [problem] boundaryN must be given for every flavor")
        values["boundary"] = tuple(bnd[A] for A in range(1, F + 1))
    if deltas:
        values["impurity_deltas"] = tuple(deltas)
    cfg = RunConfig(**values)
    _validate(cfg, source)
    return cfg


def _validate(cfg: RunConfig, source: str) -> None:
    if cfg.family is not None and cfg.family not in FAMILIES:
        raise ConfigError(f"{source}: [problem] family: unknown family {cfg.family!r} (choose from {', '.join(FAMILIES)})")
    if cfg.lambda0 not in (-1, 0, 1) or cfg.lam not in (-1, 0, 1):
        raise ConfigError(f"{source}: [problem] lambda0 and lambda must be -1, 0 or 1")
    if len(cfg.fi) != len(cfg.charges[0]):
        raise ConfigError(f"{source}: [problem] r has {len(cfg.fi)} entries, Q has {len(cfg.charges[0])} columns")
    if cfg.impurity not in ("none", "constant", "delta"):
        raise ConfigError(f"{source}: [problem] impurity: unknown kind {cfg.impurity!r}")
    if cfg.compare_region not in ("all-interior", "annulus"):
        raise ConfigError(f"{source}: [compare] region: unknown region {cfg.compare_region!r}")


def serialize_config(cfg: RunConfig) -> str:
    """Deterministic text form; every field is written so parsing restores it exactly."""
    by_section: dict[str, list[str]] = {s: [] for s in _SECTIONS}
    for (section, key), (name, kind) in _SCALARS.items():
        value = getattr(cfg, name)
        if value is None:
            continue
        by_section[section].append(f"{key} = {_render(kind, value)}")
    prob = by_section["problem"]
    for row in cfg.charges:
        prob.append("Q = " + ", ".join(repr(float(q)) for q in row))
    for A, zs in enumerate(cfg.vortices, start=1):
        for z in zs:
            prob.append(f"vortex{A} = {format_complex(z)}")
    for A, b in enumerate(cfg.boundary, start=1):
        prob.append(f"boundary{A} = {b}")
    for p, a in cfg.impurity_deltas:
        prob.append(f"impurity_delta = {format_complex(p)}, {float(a)!r}")
    out = []
    for section in _SECTIONS:
        if by_section[section]:
            out.append(f"[{section}]")
            out.extend(by_section[section])
            out.append("")
    return "\n".join(out)


def load_config(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from None
    return parse_config(text, str(p))


def as_dict(cfg: RunConfig) -> dict[str, Any]:
    """JSON-friendly view for metadata files."""

    def conv(v: Any) -> Any:
        if isinstance(v, complex):
            return format_complex(v)
        if isinstance(v, tuple):
            return [conv(x) for x in v]
        if isinstance(v, (np.floating, np.integer)):
            return v.item()
        return v

    return {f.name: conv(getattr(cfg, f.name)) for f in fields(cfg)}
