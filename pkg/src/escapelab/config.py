"""Flat key = value configuration files.

Recognized keys: alpha, f, k, kstar, V, q, m, seed, hbar, coexist_tol,
and exactly one of epsilon / beta / kappa to pick the scaling mode.
Lines starting with # are comments.  CLI flags override file values.
"""

from __future__ import annotations

from .params import ModelParams, ParamError

__all__ = ["parse_config_text", "load_config", "model_params_from_config"]

_MODEL_KEYS = {
    "alpha", "f", "k", "kstar", "V", "epsilon", "beta", "kappa",
    "q", "m", "hbar", "coexist_tol",
}
_KNOWN_KEYS = _MODEL_KEYS | {"seed", "outputs", "n_paths", "t_factor", "dt",
                             "sample_n", "workers", "fidelity"}


def parse_config_text(text: str) -> dict:
    cfg: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParamError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ParamError(f"config line {lineno}: unknown key {key!r}")
        cfg[key] = _coerce(val)
    return cfg


def _coerce(val: str):
    try:
        return int(val)
    except ValueError:
        pass
    try:
        return float(val)
    except ValueError:
        return val


def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def model_params_from_config(cfg: dict, **overrides) -> ModelParams:
    merged = {k: v for k, v in cfg.items() if k in _MODEL_KEYS}
    for k, v in overrides.items():
        if v is not None:
            merged[k] = v
    if "alpha" not in merged or "f" not in merged:
        raise ParamError("config must provide at least alpha and f")
    modes = [k for k in ("epsilon", "beta", "kappa") if merged.get(k) is not None]
    if len(modes) != 1:
        raise ParamError(f"exactly one of epsilon/beta/kappa required, got {modes or 'none'}")
    for k in ("epsilon", "beta", "kappa"):
        merged.setdefault(k, None)
    return ModelParams(**{k: (float(v) if k not in ("q",) and v is not None else v)
                          for k, v in merged.items()})
