import math
from typing import Iterable

INF = math.inf


def parse_p(p) -> float:
    """Accept a real ``p >= 1`` or ``inf`` (float or the string "inf")."""
    if isinstance(p, str):
        p = INF if p.strip().lower() in ("inf", "infinity", "+inf") else float(p)
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    return p


def lp_norm(values: Iterable[float], p: float) -> float:
    vals = [abs(v) for v in values]
    if not vals:
        return 0.0
    if p == INF:
        return max(vals)
    if p == 1:
        return math.fsum(vals)
    s = math.fsum(v**p for v in vals)
    if p == 2:
        return math.sqrt(s)
    return s ** (1.0 / p)
