"""A small hand-built lexicon for "book" and "schedule".

The space is subject (customer, police) x object (ticket, thief), four
dimensions, no null slot.  "book" is diagonal in the Bell basis

    b0 = (|customer,ticket> + |police,thief>)/sqrt2   weight 0.4
    b1 = (|customer,ticket> - |police,thief>)/sqrt2   weight 0.3
    b2 = (|customer,thief> + |police,ticket>)/sqrt2   weight 0.2
    b3 = (|customer,thief> - |police,ticket>)/sqrt2   weight 0.1

and "schedule" mixes b0/b2 by a rotation of pi/6:

    s0 =  cos(pi/6) b0 + sin(pi/6) b2   weight 0.6
    s1 = -sin(pi/6) b0 + cos(pi/6) b2   weight 0.3
    s2 = b1                             weight 0.06
    s3 = b3                             weight 0.04

so every overlap |<b_i|s_j>|^2 is one of 0, 1/4, 3/4, 1.  "novel" and
"arrest" live on product kets and have supports disjoint from each other.
"""

from __future__ import annotations

import math

import numpy as np

from .lexicon import Lexicon, RelationVocabulary
from .operators import DensityOperator

BOOK_WEIGHTS = (0.4, 0.3, 0.2, 0.1)
SCHEDULE_WEIGHTS = (0.6, 0.3, 0.06, 0.04)
ROTATION = math.pi / 6


def bell_basis() -> np.ndarray:
    r = 1 / math.sqrt(2)
    return np.array([
        [r, 0, 0, r],
        [r, 0, 0, -r],
        [0, r, r, 0],
        [0, r, -r, 0],
    ]).T


def _mix(weights, kets) -> DensityOperator:
    m = sum(w * np.outer(k, k.conj()) for w, k in zip(weights, kets))
    return DensityOperator((m + m.conj().T) / 2, (2, 2))


def book_schedule_lexicon() -> Lexicon:
    b = bell_basis()
    c, s = math.cos(ROTATION), math.sin(ROTATION)
    sched_kets = [c * b[:, 0] + s * b[:, 2], -s * b[:, 0] + c * b[:, 2], b[:, 1], b[:, 3]]
    e = np.eye(4)
    operators = {
        "book": _mix(BOOK_WEIGHTS, [b[:, i] for i in range(4)]),
        "schedule": _mix(SCHEDULE_WEIGHTS, sched_kets),
        "novel": _mix((0.7, 0.3), [e[0], e[1]]),
        "arrest": _mix((1.0,), [e[2]]),
    }
    vocabs = (
        RelationVocabulary("nsubj", ("customer", "police"), 2, null_slot=False),
        RelationVocabulary("obj", ("ticket", "thief"), 2, null_slot=False),
    )
    return Lexicon(vocabs, operators, {"source": "book-schedule fixture"})
