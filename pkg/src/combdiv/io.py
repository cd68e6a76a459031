"""JSON payloads for operators, channels and combs.

Operators are ``{"subsystems": [{"name": "A", "dim": 2}, ...], "re": [[...]], "im": [[...]]}``
(``[name, dim]`` pairs are accepted too).  Channels are either
``{"kraus": [{"re", "im"}, ...], "in": subsystems, "out": subsystems}`` or
``{"choi": operator, "inputs": [names]}``; without ``inputs`` the first label
is the input.  Combs are ``{"choi": operator, "teeth": [["I1", "O1"], ...]}``;
a tooth side holding several labels (or none) is written as a list.  Optional
``"kind"`` and ``"ancilla"`` describe control combs.  Without teeth the Choi
state is read as a canonical process comb.  Everything is validated on load.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channel import ChoiChannel, KrausChannel, as_choi_channel, choi_from_kraus, kraus_channel
from .comb import PROCESS, ProcessComb, process_comb, validate_comb
from .divergence import Tester
from .exceptions import CombError, NotACombChoi, ShapeMismatch
from .operators import LabeledOperator, Subsystem, operator


def _matrix_to_dict(m: np.ndarray) -> dict:
    m = np.asarray(m)
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def _matrix_from_dict(d: dict) -> np.ndarray:
    try:
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ShapeMismatch(f"bad matrix payload: {e}") from e
    if re.shape != im.shape:
        raise ShapeMismatch(f"real part {re.shape} vs imaginary part {im.shape}")
    return re + 1j * im


def _subsystems(items) -> list[Subsystem]:
    try:
        return [Subsystem(str(it["name"]), int(it["dim"])) if isinstance(it, dict)
                else Subsystem(str(it[0]), int(it[1])) for it in items]
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise ShapeMismatch(f"subsystems must be {{name, dim}} entries: {e}") from e


def _subsystems_payload(subs) -> list[dict]:
    return [{"name": s.name, "dim": s.dim} for s in subs]


def operator_to_dict(x: LabeledOperator) -> dict:
    return {"subsystems": _subsystems_payload(x.subsystems), **_matrix_to_dict(x.matrix)}


def operator_from_dict(d: dict) -> LabeledOperator:
    if "subsystems" not in d:
        raise ShapeMismatch("operator payload needs 'subsystems'")
    return operator(_matrix_from_dict(d), _subsystems(d["subsystems"]))


def channel_to_dict(ch) -> dict:
    if isinstance(ch, KrausChannel):
        return {
            "kraus": [_matrix_to_dict(k) for k in ch.kraus],
            "in": _subsystems_payload(ch.inputs),
            "out": _subsystems_payload(ch.outputs),
        }
    return {"choi": operator_to_dict(ch.choi), "inputs": list(ch.inputs)}


def channel_from_dict(d: dict) -> ChoiChannel:
    if "kraus" in d:
        k = kraus_channel([_matrix_from_dict(m) for m in d["kraus"]], _subsystems(d["in"]), _subsystems(d["out"]))
        return choi_from_kraus(k)
    if "choi" not in d:
        raise ShapeMismatch("channel payload needs 'kraus' or 'choi'")
    choi = operator_from_dict(d["choi"])
    inputs = [str(l) for l in d["inputs"]] if "inputs" in d else [choi.labels[0]]
    return as_choi_channel(choi, inputs)


def comb_to_dict(t: ProcessComb) -> dict:
    return {
        "choi": operator_to_dict(t.choi),
        "teeth": [_side_payload(i, o) for i, o in t.teeth],
        "kind": t.kind,
        "ancilla": list(t.ancilla),
    }


def _side_payload(i, o) -> list:
    if len(i) == 1 and len(o) == 1:
        return [i[0], o[0]]
    return [list(i), list(o)]


def _side(x) -> tuple[str, ...]:
    return (x,) if isinstance(x, str) else tuple(str(l) for l in x)


def comb_from_dict(d: dict, validate: bool = True) -> ProcessComb:
    if "choi" not in d:
        raise ShapeMismatch("comb payload needs 'choi'")
    choi = operator_from_dict(d["choi"])
    if "teeth" in d:
        t = ProcessComb(choi, [(_side(i), _side(o)) for i, o in d["teeth"]],
                        d.get("kind", PROCESS), tuple(d.get("ancilla", ())))
    else:
        t = process_comb(choi)
    if not validate:
        return t
    rep = validate_comb(t)
    if not rep.passed:
        raise NotACombChoi(f"not a valid comb: {rep.as_dict()}")
    return t


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise CombError(f"{path}: invalid JSON ({e})") from e


def load(path):
    """Load a comb or channel payload, deciding by its keys."""
    d = read_json(path)
    if "teeth" in d:
        return comb_from_dict(d)
    if "kraus" in d or "inputs" in d:
        return channel_from_dict(d)
    if "choi" in d:
        if len(d["choi"].get("subsystems", ())) == 2:
            return channel_from_dict(d)
        return comb_from_dict(d)
    if "subsystems" in d:
        return operator_from_dict(d)
    raise ShapeMismatch(f"{path}: cannot tell what this payload describes")


def to_dict(x) -> dict:
    if isinstance(x, Tester):
        return {"control": comb_to_dict(x.control), "povm": [operator_to_dict(e) for e in x.povm]}
    if isinstance(x, ProcessComb):
        return comb_to_dict(x)
    if isinstance(x, (ChoiChannel, KrausChannel)):
        return channel_to_dict(x)
    if isinstance(x, LabeledOperator):
        return operator_to_dict(x)
    raise TypeError(f"no JSON form for {type(x).__name__}")


def dump(x, path) -> None:
    Path(path).write_text(json.dumps(to_dict(x)))
