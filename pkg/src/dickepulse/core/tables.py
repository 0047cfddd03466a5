"""
Published composite sequences for Dicke and NOON states, N = 3..10

Areas and phases are in units of pi and keep the printed three-decimal
rounding. Each row records the excitation number it actually produces: the
Dicke rows use n = floor(N/2) except N = 7 and N = 9, whose printed sequences
drive the chain to n = 4 and n = 5 (fidelity >= 0.999 there, ~1e-5 at n = 3 and
n = 4).
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from .chain import PulseSequence, TargetSpec, dicke_target, noon_target

DICKE = "dicke"
NOON = "noon"


@dataclass(frozen=True)
class TableRow:
    """One printed sequence"""
    kind: str
    n_ions: int
    excitation: int  # Dicke excitation number; N for NOON rows
    total_area: float  # printed A_tot, units of pi
    sequence: PulseSequence

    def target(self) -> TargetSpec:
        """Target the row was designed for; NOON rows use the phase-free fidelity"""
        if self.kind == NOON:
            return noon_target(self.n_ions, phase_free=True)
        return dicke_target(self.n_ions, self.excitation)

    @property
    def key(self) -> str:
        return f"{self.kind}:{self.n_ions}"


_DICKE_ROWS: List[Tuple[int, int, float, List[Tuple[float, float]]]] = [
    (3, 1, 2.53, [(0.369, 0), (0.484, 2.39), (1.682, 2.976)]),
    (4, 2, 2.28, [(0.805, 0), (0.495, 1.728), (0.793, 0.566), (0.191, 0.079)]),
    (5, 2, 2.11, [(0.795, 0), (0.278, 0.403), (0.480, 0.075), (0.223, 0.309),
                  (0.333, 0.915)]),
    (6, 3, 2.12, [(0.562, 0), (0.315, 1.478), (0.343, 0.854), (0.277, 0.417),
                  (0.126, 0.091), (0.501, 1.423)]),
    (7, 4, 2.15, [(0.107, 0), (0.584, 1.694), (0.562, 1.566), (0.497, 1.313),
                  (0.039, 1.956), (0.158, 1.301), (0.206, 1.847)]),
    (8, 4, 2.46, [(0.539, 0), (0.216, 0.389), (0.459, 0.098), (0.251, 1.560),
                  (0.464, 0.816), (0.25, 0.388), (0.25, 2.078), (0.03, 1.607)]),
    (9, 5, 3.35, [(0.51, 0), (0.234, 0.83), (0.9, 0.304), (0.19, 2.025),
                  (0.352, 0.164), (0.379, 0.556), (0.358, 0.097), (0.199, 0.239),
                  (0.231, 0.471)]),
    (10, 5, 3.89, [(0.621, 0), (0.367, 1.147), (0.097, 0.994), (0.616, 1.709),
                   (0.113, 0.263), (0.203, 0.661), (0.579, 0.328), (0.223, 0.831),
                   (0.775, 0.909), (0.292, 0.462)]),
]

_NOON_ROWS: List[Tuple[int, float, List[Tuple[float, float]]]] = [
    (3, 1.60, [(0.696, 0), (0.640, 1.511), (0.259, 1.962)]),
    (4, 1.63, [(0.402, 0), (0.291, 0.151), (0.667, 1.819), (0.271, 1.465)]),
    (5, 1.88, [(0.494, 0), (0.249, 0.652), (0.651, 1.271), (0.313, 0.806),
               (0.175, 1.175)]),
    (6, 1.83, [(0.284, 0), (0.235, 0.219), (0.099, 0.701), (0.673, 1.178),
               (0.403, 0.665), (0.136, 1.022)]),
    (7, 2.06, [(0.278, 0), (0.300, 0.266), (0.338, 0.034), (0.541, 1.895),
               (0.277, 2.138), (0.137, 0.662), (0.187, 0.070)]),
    (8, 2.33, [(0.259, 0), (0.923, 0.209), (0.346, 0.408), (0.428, 1.572),
               (0.003, 1.705), (0.204, 1.216), (0.003, 2.11), (0.162, 1.543)]),
    (9, 2.46, [(0.395, 0), (0.146, 2.556), (0.186, 1.336), (0.237, 1.854),
               (0.680, 0.740), (0.452, 1.660), (0.169, 0.862), (0.007, 0.222),
               (0.186, 1.555)]),
    (10, 2.93, [(0.476, 0), (0.239, 1.247), (0.289, 1.380), (0.256, 0.305),
                (0.228, 2.021), (0.415, 0.220), (0.388, 0.749), (0.059, 1.718),
                (0.529, 1.823), (0.047, 0.861)]),
]


def _build() -> Dict[Tuple[str, int], TableRow]:
    rows: Dict[Tuple[str, int], TableRow] = {}
    for n_ions, excitation, total_area, pairs in _DICKE_ROWS:
        rows[(DICKE, n_ions)] = TableRow(
            DICKE, n_ions, excitation, total_area, PulseSequence.from_pairs(pairs)
        )
    for n_ions, total_area, pairs in _NOON_ROWS:
        rows[(NOON, n_ions)] = TableRow(
            NOON, n_ions, n_ions, total_area, PulseSequence.from_pairs(pairs)
        )
    return rows


PUBLISHED_ROWS: Dict[Tuple[str, int], TableRow] = _build()


def table_row(kind: str, n_ions: int) -> TableRow:
    """
    Look up a built-in row

    Args:
        kind: "dicke" or "noon"
        n_ions: Number of ions, 3..10

    Returns:
        The table row
    """
    key = (kind.strip().lower(), int(n_ions))
    if key not in PUBLISHED_ROWS:
        available = sorted(n for k, n in PUBLISHED_ROWS if k == key[0])
        if not available:
            raise ValueError(f"unknown table kind '{kind}' (use '{DICKE}' or '{NOON}')")
        raise ValueError(
            f"no {key[0]} row for N={n_ions}; available N: {available[0]}..{available[-1]}"
        )
    return PUBLISHED_ROWS[key]


def parse_row_key(text: str) -> TableRow:
    """Resolve a 'kind:N' key such as 'dicke:6' or 'noon:4'"""
    kind, sep, count = text.partition(":")
    if not sep or not count.strip().isdigit():
        raise ValueError(f"table row must look like 'dicke:6' or 'noon:4', got '{text}'")
    return table_row(kind, int(count))


def all_rows() -> List[TableRow]:
    """Every built-in row, Dicke first, ordered by N"""
    return sorted(PUBLISHED_ROWS.values(), key=lambda row: (row.kind != DICKE, row.n_ions))
