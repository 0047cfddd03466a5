"""
JSON and CSV files: sequences, solutions, targets, reports and robustness curves

Areas and phases are stored in units of pi with full float precision, so a
written file replays to the identical fidelity.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Union

import numpy as np

from ..core.chain import PulseSequence, SystemConfig, TargetSpec, custom_target
from ..core.errors import SequenceFormatError
from ..core.optimizer import Solution
from ..core.robustness import RobustnessCurve

CURVE_HEADER = ["sigma", "mean_fidelity", "std_fidelity", "min_fidelity"]


@dataclass(frozen=True)
class SequenceRecord:
    """A sequence together with the system it was written for"""
    sequence: PulseSequence
    n_ions: Optional[int] = None
    lamb_dicke: float = 0.0
    stored_fidelity: Optional[float] = None
    target_label: Optional[str] = None
    target: Optional[TargetSpec] = None  # full target when the file stores its amplitudes


def _read_json(path: Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise SequenceFormatError("file not found", source=str(path))
    except json.JSONDecodeError as e:
        raise SequenceFormatError(e.msg, source=str(path), line=e.lineno)


def _write_json(data: Any, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def _number(value: Any, source: str, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SequenceFormatError(f"expected a number, got {value!r}", source=source, field=field)
    if not np.isfinite(value):
        raise SequenceFormatError("value must be finite", source=source, field=field)
    return float(value)


def _complex(value: Any, source: str, field: str) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise SequenceFormatError("complex values are [real, imag] pairs", source=source, field=field)
        return complex(_number(value[0], source, f"{field}[0]"), _number(value[1], source, f"{field}[1]"))
    return complex(_number(value, source, field))


def _pulses_from(data: Any, source: str, field: str = "pulses") -> PulseSequence:
    if not isinstance(data, list) or not data:
        raise SequenceFormatError("expected a non-empty list of pulses", source=source, field=field)
    pairs = []
    for k, entry in enumerate(data):
        where = f"{field}[{k}]"
        if isinstance(entry, dict):
            if "area" not in entry:
                raise SequenceFormatError("missing 'area'", source=source, field=where)
            area = _number(entry["area"], source, f"{where}.area")
            phase = _number(entry.get("phase", 0.0), source, f"{where}.phase")
        elif isinstance(entry, (list, tuple)) and len(entry) == 2:
            area = _number(entry[0], source, f"{where}[0]")
            phase = _number(entry[1], source, f"{where}[1]")
        else:
            raise SequenceFormatError("pulse must be {area, phase} or [area, phase]",
                                      source=source, field=where)
        if area < 0.0:
            raise SequenceFormatError(f"area must be non-negative, got {area}",
                                      source=source, field=f"{where}.area")
        pairs.append((area, phase))
    return PulseSequence.from_pairs(pairs)


def _pulses_to(seq: PulseSequence) -> List[Dict[str, float]]:
    return [{"area": pulse.area, "phase": pulse.phase} for pulse in seq]


def _system_from(data: Dict[str, Any], source: str) -> Dict[str, Any]:
    system = data.get("system", {})
    if not isinstance(system, dict):
        raise SequenceFormatError("expected an object", source=source, field="system")
    result: Dict[str, Any] = {"n_ions": None, "lamb_dicke": 0.0}
    if "n_ions" in system:
        n_ions = system["n_ions"]
        if isinstance(n_ions, bool) or not isinstance(n_ions, int) or n_ions < 1:
            raise SequenceFormatError(f"expected a positive integer, got {n_ions!r}",
                                      source=source, field="system.n_ions")
        result["n_ions"] = n_ions
    if "lamb_dicke" in system:
        result["lamb_dicke"] = _number(system["lamb_dicke"], source, "system.lamb_dicke")
    return result


def _system_to(config: SystemConfig) -> Dict[str, Any]:
    return {"n_ions": config.n_ions, "lamb_dicke": config.lamb_dicke}


def _target_to(target: TargetSpec) -> Dict[str, Any]:
    return {
        "label": target.label,
        "phase_free": target.phase_free,
        "amplitudes": [[a.real, a.imag] for a in target.amplitudes],
    }


def _target_from(data: Any, source: str, label: str, field: str = "amplitudes") -> TargetSpec:
    phase_free = False
    if isinstance(data, dict):
        label = str(data.get("label", label))
        phase_free = bool(data.get("phase_free", False))
        values = data.get("amplitudes")
    else:
        values = data
    if not isinstance(values, list):
        raise SequenceFormatError("expected a list of amplitudes", source=source, field=field)
    amplitudes = [_complex(v, source, f"{field}[{k}]") for k, v in enumerate(values)]
    try:
        return custom_target(amplitudes, label=label, phase_free=phase_free)
    except ValueError as e:
        raise SequenceFormatError(str(e), source=source, field=field)


def save_sequence(seq: PulseSequence, path: Path, config: Optional[SystemConfig] = None,
                  fidelity: Optional[float] = None,
                  target: Optional[Union[TargetSpec, str]] = None) -> None:
    """Write {system, pulses[, target, fidelity]}; a TargetSpec is stored with its amplitudes"""
    data: Dict[str, Any] = {}
    if config is not None:
        data["system"] = _system_to(config)
    data["pulses"] = _pulses_to(seq)
    if isinstance(target, TargetSpec):
        data["target"] = _target_to(target)
    elif target is not None:
        data["target"] = target
    if fidelity is not None:
        data["fidelity"] = fidelity
    _write_json(data, path)


def save_solutions(solutions: Sequence[Solution], path: Path, config: SystemConfig,
                   target: TargetSpec, fidelity_goal: float) -> None:
    """Write ranked solutions, best first"""
    data = {
        "system": _system_to(config),
        "target": _target_to(target),
        "fidelity_goal": fidelity_goal,
        "solutions": [
            {
                "rank": rank,
                "restart_index": s.restart_index,
                "fidelity": s.fidelity,
                "total_area": s.total_area,
                "iterations": s.iterations,
                "qualified": s.qualified,
                "pulses": _pulses_to(s.sequence),
            }
            for rank, s in enumerate(solutions)
        ],
    }
    _write_json(data, path)


def load_sequence(path: Path, index: int = 0) -> SequenceRecord:
    """
    Read a sequence file, or entry ``index`` of a solutions file

    Raises:
        SequenceFormatError: with the source and the offending line or field
    """
    source = str(path)
    data = _read_json(Path(path))
    if isinstance(data, list):
        return SequenceRecord(sequence=_pulses_from(data, source, field="[root]"))
    if not isinstance(data, dict):
        raise SequenceFormatError("expected a JSON object", source=source)

    system = _system_from(data, source)

    if "solutions" in data:
        entries = data["solutions"]
        if not isinstance(entries, list) or not entries:
            raise SequenceFormatError("expected a non-empty list", source=source, field="solutions")
        if not 0 <= index < len(entries):
            raise SequenceFormatError(f"index {index} outside 0..{len(entries) - 1}",
                                      source=source, field="solutions")
        entry = entries[index]
        if not isinstance(entry, dict):
            raise SequenceFormatError("expected an object", source=source, field=f"solutions[{index}]")
        seq = _pulses_from(entry.get("pulses"), source, field=f"solutions[{index}].pulses")
        fidelity = entry.get("fidelity")
    else:
        if "pulses" not in data:
            raise SequenceFormatError("missing 'pulses'", source=source, field="pulses")
        seq = _pulses_from(data["pulses"], source)
        fidelity = data.get("fidelity")

    target_label, target = None, None
    stored = data.get("target")
    if isinstance(stored, str):
        target_label = stored
    elif isinstance(stored, dict):
        target = _target_from(stored, source, "custom", field="target.amplitudes")
        target_label = target.label

    if fidelity is not None:
        fidelity = _number(fidelity, source, "fidelity")
    return SequenceRecord(
        sequence=seq,
        n_ions=system["n_ions"],
        lamb_dicke=system["lamb_dicke"],
        stored_fidelity=fidelity,
        target_label=target_label,
        target=target,
    )


def load_target(path: Path) -> TargetSpec:
    """
    Read a custom target: a list of amplitudes, or {amplitudes, label, phase_free}

    Amplitudes are numbers or [real, imag] pairs indexed by chain position n.
    """
    return _target_from(_read_json(Path(path)), str(path), f"custom:{Path(path).name}")


def save_report(report: Dict[str, Any], path: Path) -> None:
    """Write a JSON report"""
    _write_json(report, path)


def write_curve_csv(curve: RobustnessCurve, destination: Union[Path, TextIO]) -> None:
    """CSV with header sigma,mean_fidelity,std_fidelity,min_fidelity"""
    if isinstance(destination, (str, Path)):
        path = Path(destination)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            write_curve_csv(curve, f)
        return
    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for row in curve.to_rows():
        writer.writerow([repr(value) for value in row])


def read_curve_csv(path: Path) -> List[Dict[str, float]]:
    """Rows of a curve file as dicts keyed by the header"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CURVE_HEADER:
            raise SequenceFormatError(f"unexpected header {reader.fieldnames}", source=str(path), line=1)
        return [{key: float(value) for key, value in row.items()} for row in reader]
