#!/usr/bin/env python3
# Copyright 2026 The rategame Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds data/compas.csv and data/adult.csv from the public raw files.

Raw inputs:
  compas-scores-two-years.csv  (ProPublica compas-analysis repository)
  adult.data                   (UCI Adult, training portion)

Both are also shipped inside the `responsibly` wheel under
responsibly/dataset/{compas,adult}/.

Usage: prepare_data.py --compas RAW.csv --adult adult.data --out data/
"""

import argparse
import csv
import os

COMPAS_COLUMNS = [
    "sex", "age", "age_cat", "race", "juv_fel_count", "juv_misd_count",
    "juv_other_count", "priors_count", "c_charge_degree", "two_year_recid",
]

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education_num",
    "marital_status", "occupation", "relationship", "race", "sex",
    "capital_gain", "capital_loss", "hours_per_week", "native_country",
    "income",
]


def prepare_compas(src, dst):
    # Standard ProPublica screening filter.
    kept = 0
    with open(src, newline="") as fin, open(dst, "w", newline="") as fout:
        reader = csv.DictReader(fin)
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(COMPAS_COLUMNS)
        for row in reader:
            days = row["days_b_screening_arrest"]
            if days == "" or not -30 <= int(days) <= 30:
                continue
            if row["is_recid"] == "-1" or row["c_charge_degree"] == "O":
                continue
            if row["score_text"] == "N/A":
                continue
            writer.writerow([row[c] for c in COMPAS_COLUMNS])
            kept += 1
    return kept


def prepare_adult(src, dst):
    kept = 0
    with open(src) as fin, open(dst, "w", newline="") as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(ADULT_COLUMNS)
        for line in fin:
            cells = [c.strip() for c in line.strip().split(",")]
            if len(cells) != len(ADULT_COLUMNS):
                continue
            writer.writerow(cells)
            kept += 1
    return kept


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--compas", required=True)
    parser.add_argument("--adult", required=True)
    parser.add_argument("--out", default="data")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    n = prepare_compas(args.compas, os.path.join(args.out, "compas.csv"))
    print(f"compas.csv: {n} rows")
    n = prepare_adult(args.adult, os.path.join(args.out, "adult.csv"))
    print(f"adult.csv: {n} rows")


if __name__ == "__main__":
    main()
