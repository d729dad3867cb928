"""Write the Wisconsin diagnostic breast cancer data as a CSV for ``slmp``.

Uses the copy bundled with scikit-learn, so no network access is needed::

    python3 scripts/export_wdbc.py data/wdbc.csv

Labels are ``B`` (benign) and ``M`` (malignant) in a ``diagnosis`` column.
"""
import argparse
import csv
from pathlib import Path


def export(path) -> Path:
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = [n.replace(" ", "_") for n in bunch.feature_names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["diagnosis"])
        for row, t in zip(bunch.data, bunch.target):
            # sklearn codes malignant as 0 and benign as 1
            w.writerow([repr(float(v)) for v in row] + ["B" if t == 1 else "M"])
    return path


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", nargs="?", default="data/wdbc.csv")
    print(export(ap.parse_args().out))
