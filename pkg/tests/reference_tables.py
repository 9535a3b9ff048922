"""Class tables transcribed by hand, used as expected values in the tests.

Labels are short class names: ``D1`` stands for ``GT_D1`` in the triangle
tables and for ``GS_D1`` in the square tables.
"""

T_CC_DIFF = {12: ["D1"], 11: ["D2", "F1"], 10: ["D3", "E1"]}

S_CC_DIFF = {
    14: ["A1"],
    13: ["A2", "D1", "D2"],
    12: ["A3", "A4", "B1", "D3", "D4", "D6", "D7", "F1", "F2", "F3", "F4", "F11"],
    11: ["A5", "B2", "D5", "D8", "D9", "D11", "D12", "E1", "E2", "E3", "E4", "F5", "F6", "F7", "F9"],
    10: ["A6", "B3", "C1", "D10", "D13", "D14", "E5", "E6", "E7", "F8", "F10"],
    9: ["D15", "E8"],
}

S_CC_HISTOGRAM = {14: 1, 13: 3, 12: 12, 11: 15, 10: 11, 9: 2}

# triangle classes whose tri-diff is at least 3, and square classes where it stays below 3
TRI_DIFF_HIGH_T = ["D2", "F1"]
TRI_DIFF_LOW_S = ["A5", "D8", "D9", "D11", "D12", "F5", "F6", "F7", "F9"]

FEASIBLE = [
    (["D1"], ["A3", "A4", "B1", "D3", "D4", "D6", "D7", "F1", "F2", "F3", "F4", "F11"]),
    (["D2", "F1"], ["B2", "D5", "E1", "E2", "E3", "E4"]),
    (["D3", "E1"], ["A6", "B3", "C1", "D10", "D13", "D14", "E5", "E6", "E7", "F8", "F10"]),
]

CASES = {
    "A": [
        (["D1"], ["D6", "F1", "F2", "F4", "F11", "F3"]),
        (["D2", "F1"], ["B2", "E1", "E3"]),
        (["D3", "E1"], ["F8"]),
    ],
    "B": [
        (["D1"], ["A3", "D7"]),
        (["D2", "F1"], ["E2", "E4"]),
    ],
    "C": [
        (["D1"], ["A4", "B1", "D3", "D4"]),
        (["D2", "F1"], ["D5"]),
        (["D3", "E1"], ["A6", "B3", "C1", "D10", "D13", "D14", "E5", "E6", "E7", "F10"]),
    ],
}


def product(families):
    """Expand ``[(t_names, s_names), ...]`` into full ``(GT_x, GS_y)`` label pairs."""
    return {(f"GT_{t}", f"GS_{s}") for ts, ss in families for t in ts for s in ss}


FEASIBLE_PAIRS = product(FEASIBLE)
CASE_OF = {pair: case for case, families in CASES.items() for pair in product(families)}
