"""Line-oriented experiment configuration: `[section]` headers over
`key = value` pairs, no nesting.

Sections: [domain] (required), [field], [boundary], [run], [meanvalue],
[extremal].  Unknown keys, malformed numbers and constraint violations
are collected as line-numbered diagnostics rather than raised one at a
time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .coefficients import CoefficientField, make_field
from .errors import ConfigError, GeometryError
from .geometry import Domain, domain_from_params

_KNOWN_KEYS = {
    "domain": {"kind", "center", "radius", "a", "b", "vertices"},
    "field": {"kind", "seed", "matrix", "cell", "matrix_even", "matrix_odd", "eig_lo", "eig_hi"},
    "boundary": {"kind", "id", "coefficients", "degree", "seed"},
    "run": {"mode", "alpha", "p", "h", "geometry", "gated", "out", "seed", "dump_mesh"},
    "meanvalue": {"x0", "radii"},
    "extremal": {"degree", "population", "iterations", "extremal_h"},
}

MODES = ("verify", "meanvalue", "extremal", "sweep", "compare")


@dataclass
class BoundarySpec:
    kind: str = "fourier"            # fourier | reference | random-fourier
    ref_id: str = ""
    coefficients: tuple = (0.0, 1.0, 0.0)
    degree: int = 8
    seed: int = 0

    def label(self) -> str:
        if self.kind == "reference":
            return f"reference:{self.ref_id}"
        if self.kind == "random-fourier":
            return f"random-fourier:deg{self.degree}:seed{self.seed}"
        return "fourier:" + " ".join(f"{c:g}" for c in self.coefficients)


@dataclass
class ExperimentConfig:
    domain: Domain
    field: CoefficientField
    boundary: BoundarySpec
    mode: str = "verify"
    alpha: float = 1.0
    p_list: tuple = (2.0,)
    h_list: tuple = (0.02,)
    geometry: str = "auto"
    gated: bool = True
    out: str = "oscbound-out"
    seed: int = 0
    dump_mesh: bool = False
    mv_x0: tuple = (0.0, 0.0)
    mv_radii: tuple = (0.2, 0.4, 0.6)
    ex_degree: int = 8
    ex_population: int = 32
    ex_iterations: int = 200
    ex_h: float = 0.05

    def planned_runs(self) -> int:
        return len(self.p_list) * len(self.h_list)


def _parse_sections(text: str):
    """(section -> {key: (value, line_no)}), plus diagnostics."""
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    diags: list[str] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in _KNOWN_KEYS:
                diags.append(f"line {lineno}: unknown section [{current}]")
                current = None
            else:
                sections.setdefault(current, {})
            continue
        if "=" not in line:
            diags.append(f"line {lineno}: expected `key = value`, got {line!r}")
            continue
        if current is None:
            diags.append(f"line {lineno}: key outside any known section")
            continue
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KNOWN_KEYS[current]:
            diags.append(f"line {lineno}: unknown key {key!r} in [{current}]")
            continue
        sections[current][key] = (val, lineno)
    return sections, diags


def _floats(val: str):
    return tuple(float(tok) for tok in val.split())


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate; raises ConfigError carrying all diagnostics."""
    sections, diags = _parse_sections(text)

    def get(sec, key, default=None):
        entry = sections.get(sec, {}).get(key)
        return entry if entry is not None else (default, 0)

    if "domain" not in sections:
        diags.append("missing required section [domain]")
    domain = None
    if "domain" in sections:
        try:
            domain = domain_from_params({k: v for k, (v, _) in sections["domain"].items()})
        except (GeometryError, KeyError, ValueError) as exc:
            ln = next(iter(sections["domain"].values()), ("", 0))[1]
            diags.append(f"line {ln}: invalid domain: {exc}")

    fld = None
    fparams = {k: v for k, (v, _) in sections.get("field", {}).items()}
    try:
        kind = fparams.get("kind", "identity")
        kwargs = {"seed": int(fparams.get("seed", "0"))}
        if "matrix" in fparams:
            kwargs["matrix"] = np.array(_floats(fparams["matrix"])).reshape(2, 2)
        if "cell" in fparams:
            kwargs["cell"] = float(fparams["cell"])
        if "matrix_even" in fparams:
            kwargs["matrix_even"] = np.array(_floats(fparams["matrix_even"])).reshape(2, 2)
        if "matrix_odd" in fparams:
            kwargs["matrix_odd"] = np.array(_floats(fparams["matrix_odd"])).reshape(2, 2)
        if "eig_lo" in fparams:
            kwargs["eig_lo"] = float(fparams["eig_lo"])
        if "eig_hi" in fparams:
            kwargs["eig_hi"] = float(fparams["eig_hi"])
        fld = make_field(kind, **kwargs)
    except Exception as exc:
        ln = next(iter(sections.get("field", {}).values()), ("", 0))[1]
        diags.append(f"line {ln}: invalid field: {exc}")

    boundary = BoundarySpec()
    bsec = sections.get("boundary", {})
    if bsec:
        bkind, _ = get("boundary", "kind", "fourier")
        boundary.kind = bkind
        if bkind == "reference":
            rid, ln = get("boundary", "id", "")
            if not rid:
                diags.append(f"line {ln or '?'}: reference boundary needs `id`")
            boundary.ref_id = rid
        elif bkind == "fourier":
            val, ln = get("boundary", "coefficients", "0 1 0")
            try:
                boundary.coefficients = _floats(val)
            except ValueError:
                diags.append(f"line {ln}: malformed number in coefficients")
        elif bkind == "random-fourier":
            dval, ln = get("boundary", "degree", "8")
            sval, _ = get("boundary", "seed", "0")
            try:
                boundary.degree = int(dval)
                boundary.seed = int(sval)
            except ValueError:
                diags.append(f"line {ln}: malformed integer in random-fourier spec")
        else:
            ln = bsec.get("kind", ("", 0))[1]
            diags.append(f"line {ln}: unknown boundary kind {bkind!r}")

    cfg_kwargs = {}
    rsec = sections.get("run", {})
    if "mode" in rsec:
        mode, ln = rsec["mode"]
        if mode not in MODES:
            diags.append(f"line {ln}: unknown mode {mode!r}")
        else:
            cfg_kwargs["mode"] = mode
    if "alpha" in rsec:
        val, ln = rsec["alpha"]
        try:
            alpha = float(val)
            if not (0 < alpha <= 1):
                diags.append(f"line {ln}: alpha must lie in (0,1]")
            else:
                cfg_kwargs["alpha"] = alpha
        except ValueError:
            diags.append(f"line {ln}: malformed number {val!r} for alpha")
    if "p" in rsec:
        val, ln = rsec["p"]
        try:
            plist = _floats(val)
            if any(not (1 <= p < math.inf) for p in plist):
                diags.append(f"line {ln}: p values must lie in [1, inf)")
            else:
                cfg_kwargs["p_list"] = plist
        except ValueError:
            diags.append(f"line {ln}: malformed number in p list")
    if "h" in rsec:
        val, ln = rsec["h"]
        try:
            hlist = _floats(val)
            if any(h <= 0 for h in hlist):
                diags.append(f"line {ln}: h values must be positive")
            if any(h2 >= h1 for h1, h2 in zip(hlist, hlist[1:])):
                diags.append(f"line {ln}: h list must be strictly decreasing")
            cfg_kwargs["h_list"] = hlist
        except ValueError:
            diags.append(f"line {ln}: malformed number in h list")
    if "geometry" in rsec:
        val, ln = rsec["geometry"]
        if val not in ("auto", "ball", "smooth", "cone", "john"):
            diags.append(f"line {ln}: unknown geometry kind {val!r}")
        else:
            cfg_kwargs["geometry"] = val
    if "gated" in rsec:
        val, ln = rsec["gated"]
        if val.lower() not in ("true", "false", "0", "1"):
            diags.append(f"line {ln}: gated must be true/false")
        else:
            cfg_kwargs["gated"] = val.lower() in ("true", "1")
    if "dump_mesh" in rsec:
        val, _ = rsec["dump_mesh"]
        cfg_kwargs["dump_mesh"] = val.lower() in ("true", "1")
    if "out" in rsec:
        cfg_kwargs["out"] = rsec["out"][0]
    if "seed" in rsec:
        val, ln = rsec["seed"]
        try:
            cfg_kwargs["seed"] = int(val)
        except ValueError:
            diags.append(f"line {ln}: malformed integer {val!r} for seed")

    mv = sections.get("meanvalue", {})
    if "x0" in mv:
        val, ln = mv["x0"]
        try:
            x0 = _floats(val)
            if len(x0) != 2:
                diags.append(f"line {ln}: x0 needs exactly two coordinates")
            else:
                cfg_kwargs["mv_x0"] = x0
        except ValueError:
            diags.append(f"line {ln}: malformed number in x0")
    if "radii" in mv:
        val, ln = mv["radii"]
        try:
            radii = _floats(val)
            if any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])) or any(r <= 0 for r in radii):
                diags.append(f"line {ln}: radii must be positive and strictly increasing")
            else:
                cfg_kwargs["mv_radii"] = radii
        except ValueError:
            diags.append(f"line {ln}: malformed number in radii")

    ex = sections.get("extremal", {})
    for key, attr, conv in (("degree", "ex_degree", int), ("population", "ex_population", int),
                            ("iterations", "ex_iterations", int), ("extremal_h", "ex_h", float)):
        if key in ex:
            val, ln = ex[key]
            try:
                cfg_kwargs[attr] = conv(val)
            except ValueError:
                diags.append(f"line {ln}: malformed value {val!r} for {key}")

    if diags:
        raise ConfigError(diags)
    return ExperimentConfig(domain=domain, field=fld, boundary=boundary, **cfg_kwargs)
