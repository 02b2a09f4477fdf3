#!/usr/bin/env python3
"""Build the CSV files under data/ used by the dataset reproduction suite.

Sources, in order of preference:

  --fetch             download the original files from the UCI repository
  --uci-dir DIR       convert original UCI files already present in DIR
                      (wdbc.data, processed.cleveland.data, parkinsons.data)
  --python-bundles    recover WDBC from scikit-learn's bundled copy and the
                      Cleveland heart-disease table from an Orange3 wheel
                      (pass the wheel path with --orange-wheel)

Each output is a plain comma-separated file with a header row. Missing values
are written as "?" so that the loader drops those rows.
"""

import argparse
import csv
import hashlib
import io
import os
import sys
import urllib.request
import zipfile

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
URLS = {
    "wdbc.data": f"{UCI}/breast-cancer-wisconsin/wdbc.data",
    "processed.cleveland.data": f"{UCI}/heart-disease/processed.cleveland.data",
    "parkinsons.data": f"{UCI}/parkinsons/parkinsons.data",
}

WDBC_FEATURES = [
    f"{name}_{stat}"
    for stat in ("mean", "se", "worst")
    for name in (
        "radius", "texture", "perimeter", "area", "smoothness", "compactness",
        "concavity", "concave_points", "symmetry", "fractal_dimension",
    )
]
HEART_COLUMNS = [
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg", "thalach",
    "exang", "oldpeak", "slope", "ca", "thal", "num",
]


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows) sha256={sha256(path)}")


def sha256(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def convert_wdbc(text):
    rows = []
    for line in text.strip().splitlines():
        cells = line.strip().split(",")
        # id, diagnosis, 30 features
        rows.append([cells[1]] + cells[2:])
    return ["diagnosis"] + WDBC_FEATURES, rows


def convert_cleveland(text):
    rows = [line.strip().split(",") for line in text.strip().splitlines()]
    return HEART_COLUMNS, rows


def convert_parkinsons(text):
    reader = list(csv.reader(io.StringIO(text.strip())))
    header, body = reader[0], reader[1:]
    # drop the subject name column
    return header[1:], [r[1:] for r in body]


def from_uci(read):
    out = {}
    out["wdbc.csv"] = convert_wdbc(read("wdbc.data"))
    out["heart_cleveland.csv"] = convert_cleveland(read("processed.cleveland.data"))
    try:
        out["parkinsons.csv"] = convert_parkinsons(read("parkinsons.data"))
    except OSError as err:
        print(f"parkinsons.data unavailable: {err}", file=sys.stderr)
    return out


def from_python_bundles(orange_wheel):
    import sklearn

    path = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data", "breast_cancer.csv")
    with open(path) as fh:
        lines = fh.read().strip().splitlines()[1:]
    wdbc = []
    for line in lines:
        cells = line.split(",")
        # scikit-learn codes 0 = malignant, 1 = benign
        wdbc.append(["M" if cells[-1] == "0" else "B"] + cells[:-1])
    out = {"wdbc.csv": (["diagnosis"] + WDBC_FEATURES, wdbc)}

    if orange_wheel:
        raw = zipfile.ZipFile(orange_wheel).read("Orange/datasets/heart_disease.tab").decode()
        codes = {
            1: {"female": "0", "male": "1"},
            2: {"typical ang": "1", "atypical ang": "2", "non-anginal": "3", "asymptomatic": "4"},
            6: {"normal": "0", "ST-T abnormal": "1", "left vent hypertrophy": "2"},
            10: {"upsloping": "1", "flat": "2", "downsloping": "3"},
            12: {"normal": "3", "fixed defect": "6", "reversable defect": "7"},
        }
        heart = []
        for line in raw.splitlines()[3:]:
            cells = line.split("\t")
            row = []
            for i, c in enumerate(cells):
                c = c.strip()
                if c in ("", "?"):
                    row.append("?")
                else:
                    row.append(codes.get(i, {}).get(c, c))
            heart.append(row)
        # the bundled copy already joins classes 1-4 into 1
        out["heart_cleveland.csv"] = (HEART_COLUMNS, heart)
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--fetch", action="store_true")
    g.add_argument("--uci-dir")
    g.add_argument("--python-bundles", action="store_true")
    p.add_argument("--orange-wheel")
    p.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = p.parse_args()

    if args.fetch:
        def read(name):
            with urllib.request.urlopen(URLS[name], timeout=60) as resp:
                return resp.read().decode()
        tables = from_uci(read)
    elif args.uci_dir:
        def read(name):
            with open(os.path.join(args.uci_dir, name)) as fh:
                return fh.read()
        tables = from_uci(read)
    else:
        tables = from_python_bundles(args.orange_wheel)

    os.makedirs(args.out, exist_ok=True)
    for name, (header, rows) in sorted(tables.items()):
        write_csv(os.path.join(args.out, name), header, rows)


if __name__ == "__main__":
    main()
