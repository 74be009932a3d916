"""Experiment files: `[section]` headers and `key = value` lines.

Vectors are comma-separated reals, matrices are rows separated by ';',
functions of naturals are FSpec strings (const K | id | affine A B |
table v0,v1,... | ceilexp A).
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from mppa.bounds import DEFAULT_MAX_BITS, DEFAULT_MAX_CALLS, Affine, Budget, CeilExp, Const, Identity, Table
from mppa.errors import ConfigError, MppaError
from mppa.operators import as_point, make_operator
from mppa.schedules import Moduli, Schedule, parse_error_family, parse_family

logger = logging.getLogger(__name__)

OPERATOR_PARAMS = {
    "quadratic": ("center", "weight"),
    "ball": ("center", "radius"),
    "box": ("lo", "hi"),
    "linear": ("matrix",),
    "rotation": (),
}
VECTOR_PARAMS = ("center", "lo", "hi")

SECTIONS = {
    "problem": ("operator", "zero", "target") + tuple(sorted({p for ps in OPERATOR_PARAMS.values() for p in ps})),
    "iteration": ("u", "z0"),
    "schedule": ("lambda", "gamma", "c", "error"),
    "moduli": ("a", "c", "Cmaj", "ell", "L", "Gamma", "E", "N1", "N2", "N3"),
    "run": ("horizon", "k", "f", "budget_bits", "budget_calls", "seed"),
}
REQUIRED = {
    "problem": ("operator",),
    "iteration": ("u", "z0"),
    "schedule": ("lambda", "gamma", "c"),
    "moduli": ("a", "c", "Cmaj", "ell", "L", "E", "N1", "N2", "N3"),
    "run": ("horizon", "k", "f"),
}


# -- FSpec ------------------------------------------------------------------

@dataclass(frozen=True)
class FSpec:
    text: str
    fn: object = field(compare=False, repr=False)

    def __str__(self):
        return self.text


def _natural(word):
    value = int(word)
    if value < 0:
        raise ValueError(f"'{word}' is not a natural number")
    return value


def parse_fspec(text):
    words = text.replace(",", " , ").split()
    kind, args = (words[0], words[1:]) if words else ("", [])
    if kind == "const" and len(args) == 1:
        n = _natural(args[0])
        return FSpec(f"const {n}", Const(n))
    if kind == "id" and not args:
        return FSpec("id", Identity())
    if kind == "affine" and len(args) == 2:
        a, b = _natural(args[0]), _natural(args[1])
        return FSpec(f"affine {a} {b}", Affine(a, b))
    if kind == "ceilexp" and len(args) == 1:
        a = _natural(args[0])
        return FSpec(f"ceilexp {a}", CeilExp(a))
    if kind == "table" and args:
        values = tuple(_natural(w) for w in args if w != ",")
        table = Table(values)
        if not table.was_monotone:
            logger.warning("table %s is not monotone; using its majorant %s",
                           ",".join(map(str, table.raw)), ",".join(map(str, table.values)))
            table = Table(table.values)
        return FSpec("table " + ",".join(map(str, table.values)), table)
    raise ValueError(f"unknown function spec '{text.strip()}' (const K | id | affine A B | table v0,... | ceilexp A)")


# -- config -----------------------------------------------------------------

@dataclass
class ExperimentConfig:
    operator_kind: str
    operator_params: dict
    op: object
    u: np.ndarray
    z0: np.ndarray
    schedule: Schedule
    moduli: Moduli
    moduli_specs: dict
    horizon: int
    ks: list
    fspecs: list
    budget: Budget = field(default_factory=Budget)
    seed: int = 7
    zero: Optional[np.ndarray] = None
    target: Optional[np.ndarray] = None
    name: str = "experiment"

    @property
    def s(self):
        """The declared zero, or the operator's own witness."""
        return self.op.zero_set_witness if self.zero is None else self.zero

    @property
    def target_point(self):
        return self.op.nearest_zero(self.u) if self.target is None else self.target


def _vector(text):
    return np.array([float(v) for v in text.split(",")], dtype=float)


def _matrix(text):
    return np.array([[float(v) for v in row.split(",")] for row in text.split(";")], dtype=float)


def _ks(text):
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = _natural(lo.strip()), _natural(hi.strip())
        if hi < lo:
            raise ValueError(f"empty k range '{text}'")
        return list(range(lo, hi + 1))
    return [_natural(w.strip()) for w in text.split(",")]


def _read_sections(text):
    """{section: {key: (line_no, value)}} plus the located syntax errors."""
    sections, errors = {}, []
    current = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in SECTIONS:
                errors.append(f"line {line_no}: unknown section [{current}]")
            elif current in sections:
                errors.append(f"line {line_no}: duplicate section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            errors.append(f"line {line_no}: expected 'key = value'")
            continue
        if current is None:
            errors.append(f"line {line_no}: key outside of any section")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if current in SECTIONS and key not in SECTIONS[current]:
            errors.append(f"line {line_no}: unknown key '{key}' in [{current}]")
        elif key in sections[current]:
            errors.append(f"line {line_no}: duplicate key '{key}'")
        else:
            sections[current][key] = (line_no, value)
    return sections, errors


class _Builder:
    def __init__(self, sections, errors):
        self.sections = sections
        self.errors = errors

    def get(self, section, key, convert, default=None):
        entry = self.sections.get(section, {}).get(key)
        if entry is None:
            return default
        line_no, value = entry
        try:
            return convert(value)
        except (ValueError, MppaError) as err:
            self.errors.append(f"line {line_no}: {key}: {err}")
            return None

    def where(self, section, key):
        entry = self.sections.get(section, {}).get(key)
        return f"line {entry[0]}: " if entry else ""


def parse_config(text, name="experiment"):
    sections, errors = _read_sections(text)
    for section in SECTIONS:
        if section not in sections:
            errors.append(f"missing section [{section}]")
            continue
        for key in REQUIRED[section]:
            if key not in sections[section]:
                errors.append(f"[{section}] missing key '{key}'")
    if errors:
        raise ConfigError(errors)

    b = _Builder(sections, errors)
    kind = b.get("problem", "operator", str.strip)
    params = {}
    if kind not in OPERATOR_PARAMS:
        errors.append(f"{b.where('problem', 'operator')}unknown operator '{kind}' ({' | '.join(OPERATOR_PARAMS)})")
    else:
        for key in sections["problem"]:
            if key not in ("operator", "zero", "target") and key not in OPERATOR_PARAMS[kind]:
                errors.append(f"{b.where('problem', key)}key '{key}' does not apply to a {kind} operator")
        for key in OPERATOR_PARAMS[kind]:
            convert = _matrix if key == "matrix" else _vector if key in VECTOR_PARAMS else float
            value = b.get("problem", key, convert)
            if value is not None:
                params[key] = value
    op = None
    if not errors:
        try:
            op = make_operator(kind, **params)
        except (MppaError, TypeError) as err:
            errors.append(f"{b.where('problem', 'operator')}{err}")
    dim = op.dim if op is not None else None

    def point(text):
        return as_point(_vector(text), dim)

    zero = b.get("problem", "zero", point)
    target = b.get("problem", "target", point)
    u = b.get("iteration", "u", point)
    z0 = b.get("iteration", "z0", point)

    lam = b.get("schedule", "lambda", parse_family)
    gamma = b.get("schedule", "gamma", parse_family)
    c = b.get("schedule", "c", parse_family)
    error = b.get("schedule", "error", parse_error_family, default=parse_error_family("zero"))
    schedule = None
    if None not in (lam, gamma, c, error):
        try:
            schedule = Schedule(lam, gamma, c, error).check()
            if dim is not None:
                error.at(0, dim)
        except MppaError as err:
            errors.append(f"{b.where('schedule', 'lambda')}schedule invalid at index {getattr(err, 'index', 0)}: {err}")

    specs = {}
    for key in ("Cmaj", "ell", "L", "Gamma", "E"):
        spec = b.get("moduli", key, parse_fspec)
        if spec is not None:
            specs[key] = spec
    scalars = {key: b.get("moduli", key, _natural) for key in ("a", "c", "N1", "N2", "N3")}
    moduli = None
    if None not in scalars.values() and all(k in specs for k in ("Cmaj", "ell", "L", "E")):
        try:
            moduli = Moduli(Cmaj=specs["Cmaj"].fn, ell=specs["ell"].fn, L=specs["L"].fn, E=specs["E"].fn,
                            Gamma=specs["Gamma"].fn if "Gamma" in specs else None, **scalars)
        except MppaError as err:
            errors.append(f"{b.where('moduli', 'a')}{err}")

    horizon = b.get("run", "horizon", _natural)
    ks = b.get("run", "k", _ks)
    fspecs = b.get("run", "f", lambda text: [parse_fspec(part) for part in text.split(";")])
    bits = b.get("run", "budget_bits", _natural, default=DEFAULT_MAX_BITS)
    calls = b.get("run", "budget_calls", _natural, default=DEFAULT_MAX_CALLS)
    seed = b.get("run", "seed", _natural, default=7)

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        operator_kind=kind,
        operator_params=params,
        op=op,
        u=u,
        z0=z0,
        schedule=schedule,
        moduli=moduli,
        moduli_specs=specs,
        horizon=horizon,
        ks=ks,
        fspecs=fspecs,
        budget=Budget(bits, calls),
        seed=seed,
        zero=zero,
        target=target,
        name=name,
    )


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), name=path.stem)


def _fmt_vector(v):
    return ", ".join(f"{x:.17g}" for x in np.asarray(v, dtype=float).ravel())


def _fmt_value(key, value):
    if key == "matrix":
        return "; ".join(_fmt_vector(row) for row in value)
    if isinstance(value, np.ndarray):
        return _fmt_vector(value)
    return f"{value:.17g}"


def _fmt_ks(ks):
    if len(ks) > 1 and ks == list(range(ks[0], ks[-1] + 1)):
        return f"{ks[0]}..{ks[-1]}"
    return ", ".join(map(str, ks))


def serialize(config):
    lines = ["[problem]", f"operator = {config.operator_kind}"]
    for key in OPERATOR_PARAMS[config.operator_kind]:
        if key in config.operator_params:
            lines.append(f"{key} = {_fmt_value(key, config.operator_params[key])}")
    if config.zero is not None:
        lines.append(f"zero = {_fmt_vector(config.zero)}")
    if config.target is not None:
        lines.append(f"target = {_fmt_vector(config.target)}")
    sched = config.schedule
    lines += [
        "",
        "[iteration]",
        f"u = {_fmt_vector(config.u)}",
        f"z0 = {_fmt_vector(config.z0)}",
        "",
        "[schedule]",
        f"lambda = {sched.lam.spec}",
        f"gamma = {sched.gamma.spec}",
        f"c = {sched.c.spec}",
        f"error = {sched.error.spec}",
        "",
        "[moduli]",
    ]
    m = config.moduli
    for key in ("a", "c"):
        lines.append(f"{key} = {getattr(m, key)}")
    for key in ("Cmaj", "ell", "L", "Gamma", "E"):
        if key in config.moduli_specs:
            lines.append(f"{key} = {config.moduli_specs[key]}")
    for key in ("N1", "N2", "N3"):
        lines.append(f"{key} = {getattr(m, key)}")
    lines += [
        "",
        "[run]",
        f"horizon = {config.horizon}",
        f"k = {_fmt_ks(config.ks)}",
        "f = " + "; ".join(str(f) for f in config.fspecs),
        f"budget_bits = {config.budget.max_bits}",
        f"budget_calls = {config.budget.max_calls}",
        f"seed = {config.seed}",
    ]
    return "\n".join(lines) + "\n"
