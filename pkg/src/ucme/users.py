"""Scripted selection heuristics standing in for human designers.

Each user scores a layout's behavior pair in [0, 1] and always picks the
highest-scoring alternative.  U1-U8 hold one criterion forever; U9-U12
switch criteria after the fifth selection to probe how the search adapts.
"""

from __future__ import annotations

from .archive import Elite

USER_IDS = tuple(f"U{i}" for i in range(1, 13))

_SWITCH_AFTER = 5


def usc(user: str, bc: tuple[float, float], s: int) -> float:
    """User selection criterion of `user` for behavior `bc` at selection
    index `s` (1-based)."""
    c, o = bc
    early = s <= _SWITCH_AFTER
    if user == "U1":
        return c
    if user == "U2":
        return o
    if user == "U3":
        return (c + o) / 2.0
    if user == "U4":
        return max(c, o)
    if user == "U5":
        return 1.0 - c
    if user == "U6":
        return 1.0 - o
    if user == "U7":
        return 1.0 - (c + o) / 2.0
    if user == "U8":
        return 1.0 - max(c, o)
    if user == "U9":
        return c if early else 1.0 - c
    if user == "U10":
        return o if early else 1.0 - o
    if user == "U11":
        return c if early else o
    if user == "U12":
        return o if early else c
    raise ValueError(f"unknown user {user!r}")


def choose(user: str, alternatives: list[Elite], s: int) -> int:
    """Index of the preferred alternative; ties go to the lowest index."""
    if not alternatives:
        raise ValueError("no alternatives to choose from")
    best = 0
    best_score = usc(user, alternatives[0].evaluation.bc, s)
    for i in range(1, len(alternatives)):
        score = usc(user, alternatives[i].evaluation.bc, s)
        if score > best_score:
            best = i
            best_score = score
    return best
