"""Recompute the improvement column from the reported baseline and MWE scores.

    python scripts/improvement_column.py
"""

from mwebraille.evalmetrics import improvement

ROWS = [
    ("English-Hindi", 0.5261, 0.7591, 23.30),
    ("English-Marathi", 0.5193, 0.7489, 22.96),
    ("English-Nepali", 0.4937, 0.7145, 22.08),
    ("English-Gujarati", 0.4871, 0.7433, 25.62),
    ("English-Urdu", 0.4693, 0.6945, 22.52),
]


def main():
    print(f"{'pair':<18}{'baseline':>9}{'mwe':>9}{'gain':>8}{'reported':>10}")
    for pair, base, mwe_score, reported in ROWS:
        gain = improvement(base, mwe_score)
        flag = "" if abs(gain - reported) <= 0.005 else "  MISMATCH"
        print(f"{pair:<18}{base:>9.4f}{mwe_score:>9.4f}{gain:>8.2f}{reported:>10.2f}{flag}")
    best = max(ROWS, key=lambda r: improvement(r[1], r[2]))
    print(f"largest gain: {best[0]}")


if __name__ == "__main__":
    main()
