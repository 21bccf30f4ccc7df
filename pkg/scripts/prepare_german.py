"""Convert the UCI Statlog german.data file (space separated, no header) to data/german.csv.

    python scripts/prepare_german.py path/to/german.data
"""

import csv
import sys
from pathlib import Path

COLUMNS = ["status", "duration", "credit_history", "purpose", "credit_amount", "savings",
           "present_employment", "installment_rate", "personal_status", "other_debtors",
           "present_residence_since", "property", "age", "installment_plans", "housing",
           "number_of_existing_credits", "job", "number_of_people_liable_for", "telephone",
           "foreign_worker", "credit"]


def main(src, dst="data/german.csv"):
    rows = [line.split() for line in Path(src).read_text().splitlines() if line.strip()]
    assert all(len(r) == len(COLUMNS) for r in rows), "unexpected field count"
    with open(dst, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(rows)
    print(f"{len(rows)} rows -> {dst}")


if __name__ == "__main__":
    main(*sys.argv[1:])
