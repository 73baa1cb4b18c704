"""Config documents: laws and runs as plain key/value trees.

A law is a table with a ``kind`` tag.  Environment kinds are ``point_mass``,
``mixture``, ``bernoulli_rate`` and ``exponential_rate``; row kinds are
``bernoulli``, ``exponential``, ``two_point``, ``table``, ``uniform``,
``truncated_upper`` and ``truncated_box``.  ``law_to_dict`` and
``law_from_dict`` round-trip exactly (``uniform`` comes back as ``table``).
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .env import (
    Bernoulli,
    BernoulliRateLaw,
    BoundedTable,
    EnvironmentLaw,
    Exponential,
    ExponentialRateLaw,
    FiniteMixture,
    LawError,
    PointMass,
    RowLaw,
    TruncatedBox,
    TruncatedUpper,
    TwoPoint,
    tilde_truncate,
    uniform,
)
from .measures import PowerDensity, ScalarLaw
from .passage import Convention, Geometry

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

SCHEMA = "lpplab.config/1"


class ConfigError(ValueError):
    pass


def _num(d, key, default=None):
    if key not in d:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {v!r}")
    return float(v)


# ---------------------------------------------------------------------------
# row laws


def row_from_dict(d: dict) -> RowLaw:
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("row law needs a 'kind'")
    kind = d["kind"]
    try:
        if kind == "bernoulli":
            return Bernoulli(_num(d, "p"))
        if kind == "exponential":
            return Exponential(_num(d, "rate"))
        if kind == "two_point":
            return TwoPoint(_num(d, "lo"), _num(d, "hi"), _num(d, "p_hi"))
        if kind == "uniform":
            return uniform(_num(d, "lo"), _num(d, "hi"))
        if kind == "table":
            pts, cdf = d.get("points"), d.get("cdf")
            if not isinstance(pts, list) or not isinstance(cdf, list):
                raise ConfigError("table needs 'points' and 'cdf' arrays")
            return BoundedTable(tuple(pts), tuple(cdf), d.get("interpolation", "step"))
        if kind == "truncated_upper":
            return tilde_truncate(row_from_dict(d["base"]), _num(d, "tau"))
        if kind == "truncated_box":
            return TruncatedBox(row_from_dict(d["base"]), _num(d, "M"))
    except KeyError as e:
        raise ConfigError(f"row law {kind!r} missing {e}") from None
    raise ConfigError(f"unknown row law kind {kind!r}")


def row_to_dict(r: RowLaw) -> dict:
    if isinstance(r, Bernoulli):
        return {"kind": "bernoulli", "p": r.p}
    if isinstance(r, Exponential):
        return {"kind": "exponential", "rate": r.rate}
    if isinstance(r, TwoPoint):
        return {"kind": "two_point", "lo": r.lo, "hi": r.hi, "p_hi": r.p_hi}
    if isinstance(r, BoundedTable):
        return {"kind": "table", "points": list(r.points), "cdf": list(r.cdf_values), "interpolation": r.interpolation}
    if isinstance(r, TruncatedUpper):
        return {"kind": "truncated_upper", "base": row_to_dict(r.base), "tau": r.tau}
    if isinstance(r, TruncatedBox):
        return {"kind": "truncated_box", "base": row_to_dict(r.base), "M": r.M}
    raise ConfigError(f"cannot serialize row law {type(r).__name__}")


# ---------------------------------------------------------------------------
# scalar rate laws


def scalar_from_dict(d: dict) -> ScalarLaw:
    atoms = tuple((float(v), float(w)) for v, w in d.get("atoms", []))
    cont = d.get("continuous")
    pd = None
    if cont is not None:
        if cont.get("family", "power") != "power":
            raise ConfigError(f"unknown continuous family {cont.get('family')!r}")
        pd = PowerDensity(_num(cont, "lo"), _num(cont, "hi"), _num(cont, "exponent", 1.0), cont.get("anchor", "lo"))
    try:
        return ScalarLaw(atoms, pd)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def scalar_to_dict(s: ScalarLaw) -> dict:
    out: dict = {"atoms": [[v, w] for v, w in s.atoms]}
    c = s.continuous
    if c is not None:
        out["continuous"] = {"family": "power", "lo": c.lo, "hi": c.hi, "exponent": c.exponent, "anchor": c.anchor}
    return out


# ---------------------------------------------------------------------------
# environment laws


def law_from_dict(d: dict) -> EnvironmentLaw:
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("law needs a 'kind'")
    kind = d["kind"]
    try:
        if kind == "point_mass":
            return PointMass(row_from_dict(d["row"]))
        if kind == "mixture":
            return FiniteMixture(tuple(row_from_dict(r) for r in d["rows"]), tuple(d["weights"]))
        if kind == "bernoulli_rate":
            return BernoulliRateLaw(scalar_from_dict(d["rates"]))
        if kind == "exponential_rate":
            nu, kappa = d.get("nu"), d.get("kappa")
            return ExponentialRateLaw(scalar_from_dict(d["rates"]), nu, kappa)
    except KeyError as e:
        raise ConfigError(f"law {kind!r} missing {e}") from None
    except LawError as e:
        raise ConfigError(str(e)) from None
    raise ConfigError(f"unknown law kind {kind!r}")


def law_to_dict(law: EnvironmentLaw) -> dict:
    if isinstance(law, PointMass):
        return {"kind": "point_mass", "row": row_to_dict(law.row)}
    if isinstance(law, FiniteMixture):
        return {"kind": "mixture", "rows": [row_to_dict(r) for r in law.rows], "weights": list(law.weights)}
    if isinstance(law, BernoulliRateLaw):
        return {"kind": "bernoulli_rate", "rates": scalar_to_dict(law.rates)}
    if isinstance(law, ExponentialRateLaw):
        out = {"kind": "exponential_rate", "rates": scalar_to_dict(law.rates)}
        if law.nu is not None:
            out["nu"], out["kappa"] = law.nu, law.kappa
        return out
    raise ConfigError(f"cannot serialize law {type(law).__name__}")


# ---------------------------------------------------------------------------
# runs


@dataclass(frozen=True)
class SweepSpec:
    geometry: Geometry
    side: str
    alphas: tuple
    label: str = ""


@dataclass(frozen=True)
class RunConfig:
    law: EnvironmentLaw
    geometry: Geometry = Geometry.WEAK_WEAK
    convention: Convention = Convention.EXCLUDE
    n: int = 1000
    replicas: int = 10
    seed: int = 0
    threads: int | None = None
    directions: tuple = ((1.0, 1.0),)
    sweeps: tuple = field(default=())
    title: str = ""


def parse_alpha_grid(text: str) -> tuple:
    """``"start:stop:step"`` (inclusive) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"alpha grid {text!r} must be start:stop:step")
        a, b, s = (float(p) for p in parts)
        if s <= 0 or b < a:
            raise ConfigError(f"bad alpha grid {text!r}")
        k = int(round((b - a) / s))
        vals = [a + i * s for i in range(k + 1) if a + i * s <= b + 1e-12]
        return tuple(round(v, 12) for v in vals)
    return tuple(float(v) for v in text.split(",") if v.strip())


def _alphas(v):
    if isinstance(v, str):
        return parse_alpha_grid(v)
    if not isinstance(v, list):
        raise ConfigError("alphas must be an array or 'start:stop:step'")
    return tuple(float(a) for a in v)


def run_from_dict(d: dict) -> RunConfig:
    if "law" not in d:
        raise ConfigError("config needs a [law] table")
    law = law_from_dict(d["law"])
    run = d.get("run", {})
    try:
        geometry = Geometry(run.get("geometry", "weak-weak"))
        convention = Convention(run.get("convention", "exclude"))
        sweeps = tuple(
            SweepSpec(Geometry(s["geometry"]), s.get("side", "alpha1"), _alphas(s["alphas"]), s.get("label", ""))
            for s in d.get("sweep", [])
        )
    except (ValueError, KeyError) as e:
        raise ConfigError(f"bad run settings: {e}") from None
    for s in sweeps:
        if s.side not in ("alpha1", "1alpha"):
            raise ConfigError(f"sweep side must be 'alpha1' or '1alpha', got {s.side!r}")
    dirs = tuple((float(x), float(y)) for x, y in run.get("directions", [[1.0, 1.0]]))
    threads = run.get("threads")
    cfg = RunConfig(
        law,
        geometry,
        convention,
        int(run.get("n", 1000)),
        int(run.get("replicas", 10)),
        int(run.get("seed", 0)),
        None if threads is None else int(threads),
        dirs,
        sweeps,
        str(d.get("title", "")),
    )
    if cfg.n < 1 or cfg.replicas < 1:
        raise ConfigError("n and replicas must be >= 1")
    return cfg


def run_to_dict(cfg: RunConfig) -> dict:
    run = {
        "geometry": cfg.geometry.value,
        "convention": cfg.convention.value,
        "n": cfg.n,
        "replicas": cfg.replicas,
        "seed": cfg.seed,
        "directions": [list(d) for d in cfg.directions],
    }
    if cfg.threads is not None:
        run["threads"] = cfg.threads
    out = {"schema": SCHEMA, "title": cfg.title, "law": law_to_dict(cfg.law), "run": run}
    if cfg.sweeps:
        out["sweep"] = [
            {"geometry": s.geometry.value, "side": s.side, "alphas": list(s.alphas), "label": s.label}
            for s in cfg.sweeps
        ]
    return out


def load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"malformed config {path}: {e}") from None


def load_run(path) -> RunConfig:
    return run_from_dict(load_toml(path))


def load_law(path) -> EnvironmentLaw:
    d = load_toml(path)
    return law_from_dict(d["law"] if "law" in d else d)
