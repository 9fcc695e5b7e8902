"""Bundled model instances shipped as package data under ``lagcap/models``."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .complex import FilteredComplex, complex_from_dict
from .errors import FormatError
from .morse import MorseData, build_pearl_complex, morse_from_dict, pearl_from_dict


def _models_dir():
    return resources.files("lagcap") / "models"


def bundled_names() -> list[str]:
    return sorted(p.name[:-5] for p in _models_dir().iterdir() if p.name.endswith(".json"))


def read_json(ref) -> tuple[dict, str]:
    """Parse a JSON file given as a path or a bundled model name."""
    path = Path(ref)
    if path.suffix == ".json" and path.exists():
        src, name = path.read_text(encoding="utf-8"), path.stem
    else:
        res = _models_dir() / f"{ref}.json"
        if not res.is_file():
            raise FormatError(f"no such file or bundled model: {ref}")
        src, name = res.read_text(encoding="utf-8"), str(ref)
    try:
        return json.loads(src), name
    except json.JSONDecodeError as exc:
        raise FormatError(f"{ref}: invalid JSON ({exc})") from exc


def _kind(obj: dict) -> str:
    if "generators" in obj:
        return "complex"
    if "disk_terms" in obj or "morse" in obj:
        return "pearl"
    if "critical_points" in obj:
        return "morse"
    if "entries" in obj:
        return "map"
    if "family" in obj:
        return "hamiltonian"
    raise FormatError("unrecognised instance file")


def load_model(ref) -> FilteredComplex:
    """A filtered complex from a complex, pearl or Morse file (Morse data: critical values as actions)."""
    from .laurent import GradingParams
    from .morse import build_morse_complex

    obj, name = read_json(ref)
    kind = _kind(obj)
    if kind == "complex":
        return complex_from_dict(obj, name=obj.get("name") or name)
    if kind == "pearl":
        pd, params, mode = pearl_from_dict(obj)
        return build_pearl_complex(pd, params, mode).with_name(obj.get("name") or name)
    if kind == "morse":
        md = morse_from_dict(obj)
        # no disk terms: choose a0 beyond every critical value so the t-shifts stay apart
        span = max(abs(c.value) for c in md.critical_points) + 1.0
        params = GradingParams(md.manifold_dim + 2, 4.0 * span / (md.manifold_dim + 2))
        return build_morse_complex(md, params).with_name(obj.get("name") or name)
    raise FormatError(f"{ref} is a {kind} file, not a complex")


def load_morse(ref) -> MorseData:
    obj, _ = read_json(ref)
    if _kind(obj) != "morse":
        raise FormatError(f"{ref} is not a Morse data file")
    return morse_from_dict(obj)


def load_hamiltonian(ref):
    from .dynamics.models import model_from_dict

    obj, name = read_json(ref)
    return model_from_dict(obj, obj.get("name") or name)


def load_chain_map(ref):
    from .chainmaps import load_map, map_from_dict

    path = Path(ref)
    if path.suffix == ".json" and path.exists():
        return load_map(path)
    obj, name = read_json(ref)
    return map_from_dict(obj, load_model, obj.get("name") or name)


def file_kind(ref) -> str:
    return _kind(read_json(ref)[0])
