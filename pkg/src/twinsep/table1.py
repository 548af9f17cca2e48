"""Published reference table: (pi2, slope, stat_error, pi1, N) per row."""

from __future__ import annotations

from typing import NamedTuple


class Table1Row(NamedTuple):
    pi2: int
    slope: float
    stat_error: float
    pi1: int
    N: int


TABLE1 = (
    Table1Row(1_000, 0.141667, 0.00599, 7_793, 79_561),
    Table1Row(5_000, 0.122415, 0.00315, 45_886, 557_521),
    Table1Row(10_000, 0.114097, 0.00325, 97_255, 1_260_991),
    Table1Row(50_000, 0.104126, 0.00105, 556_396, 8_264_959),
    Table1Row(100_000, 0.096421, 0.00095, 1_175_775, 18_409_201),
    Table1Row(500_000, 0.086700, 0.00056, 6_596_231, 115_438_669),
    Table1Row(1_000_000, 0.081143, 0.00041, 13_804_822, 252_427_603),
    Table1Row(3_000_000, 0.075491, 0.00035, 44_214_960, 863_029_303),
    Table1Row(5_000_000, 0.073150, 0.00031, 75_860_671, 1_523_975_911),
    Table1Row(8_000_000, 0.070965, 0.00032, 124_538_861, 2_566_997_821),
    Table1Row(10_000_000, 0.070154, 0.00029, 157_523_559, 3_285_916_171),
    Table1Row(12_000_000, 0.069814, 0.00024, 190_894_477, 4_020_634_603),
)

BY_PI2 = {row.pi2: row for row in TABLE1}
BY_N = {row.N: row for row in TABLE1}
