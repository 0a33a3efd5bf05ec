#!/usr/bin/env python3
"""Generate the synthetic dataset snapshots under data/.

The acceptance suite needs an Adult-Income-shaped and a Travel-shaped dataset
with a controlled association structure: known column-retention counts at the
thresholds 0.1/0.2 (income) and 0.15/0.2 (travel), elbow points inside fixed
bands, and realistic vocabularies. The public Kaggle files are not bundled, so
this script draws stand-ins from a seeded generative model and verifies every
constraint with an independent Python implementation of the same association
measures the library uses. Regenerate with:  python3 scripts/gen_snapshots.py
"""

import json
import math
import os
import sys

import numpy as np

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


# ---------------------------------------------------------------------------
# association measures (pairwise-complete, absolute values), mirroring the
# library: Pearson for numerical pairs, Cramér's V for categorical pairs, eta
# for mixed pairs; the target column counts as categorical.
# ---------------------------------------------------------------------------

def pearson(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2 or x.std() == 0 or y.std() == 0:
        return 0.0
    return abs(float(np.corrcoef(x, y)[0, 1]))


def cramers_v(a, b):
    cats_a = sorted(set(a))
    cats_b = sorted(set(b))
    if len(cats_a) < 2 or len(cats_b) < 2:
        return 0.0
    n = len(a)
    idx_a = {c: i for i, c in enumerate(cats_a)}
    idx_b = {c: i for i, c in enumerate(cats_b)}
    table = np.zeros((len(cats_a), len(cats_b)))
    for va, vb in zip(a, b):
        table[idx_a[va], idx_b[vb]] += 1
    row = table.sum(axis=1, keepdims=True)
    col = table.sum(axis=0, keepdims=True)
    expected = row @ col / n
    with np.errstate(divide="ignore", invalid="ignore"):
        chi2 = np.where(expected > 0, (table - expected) ** 2 / expected, 0.0).sum()
    return min(1.0, math.sqrt(chi2 / (n * (min(table.shape) - 1))))


def eta(groups, y):
    y = np.asarray(y, dtype=float)
    if len(y) < 2:
        return 0.0
    mean = y.mean()
    ss_total = ((y - mean) ** 2).sum()
    if ss_total == 0:
        return 0.0
    ss_between = 0.0
    for g in set(groups):
        vals = y[np.asarray([gi == g for gi in groups])]
        ss_between += len(vals) * (vals.mean() - mean) ** 2
    return min(1.0, math.sqrt(ss_between / ss_total))


def association(col_a, col_b, kind_a, kind_b):
    mask = [va is not None and vb is not None for va, vb in zip(col_a, col_b)]
    a = [v for v, m in zip(col_a, mask) if m]
    b = [v for v, m in zip(col_b, mask) if m]
    if kind_a == "numerical" and kind_b == "numerical":
        return pearson(a, b)
    if kind_a == "categorical" and kind_b == "categorical":
        return cramers_v(a, b)
    if kind_a == "categorical":
        return eta(a, b)
    return eta(b, a)


def elbow_value(sorted_values):
    """Max perpendicular distance to the chord, 1-based x; ties to the left."""
    m = len(sorted_values)
    x1, y1 = 1.0, sorted_values[0]
    x2, y2 = float(m), sorted_values[-1]
    dx, dy = x2 - x1, y2 - y1
    chord = math.hypot(dx, dy)
    best, best_dist = 0, -1.0
    for i, v in enumerate(sorted_values):
        cross = dx * (v - y1) - dy * (i + 1 - x1)
        dist = abs(cross) / chord
        if dist > best_dist:
            best_dist = dist
            best = i
    return sorted_values[best]


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def choice(rng, values, probs):
    return values[rng.choice(len(values), p=np.asarray(probs) / np.sum(probs))]


def sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


def write_csv(path, header, rows, missing=""):
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(missing if v is None else str(v) for v in row) + "\n")


def profile_of(columns, kinds, names, feature):
    fi = names.index(feature)
    strengths = {}
    for j, name in enumerate(names):
        if j == fi:
            continue
        strengths[name] = association(columns[fi], columns[j], kinds[fi], kinds[j])
    return strengths


def check_bands(tag, strengths, top, mid, low, top_cut, mid_cut, low_cap,
                margin=0.015):
    ok = True
    for name in top:
        v = strengths[name]
        if v < top_cut + margin:
            print(f"  [{tag}] TOP {name} = {v:.3f} < {top_cut + margin:.3f}")
            ok = False
    for name in mid:
        v = strengths[name]
        if not (mid_cut + margin <= v <= top_cut - margin):
            print(f"  [{tag}] MID {name} = {v:.3f} outside "
                  f"[{mid_cut + margin:.3f}, {top_cut - margin:.3f}]")
            ok = False
    for name in low:
        v = strengths[name]
        if not (0.005 <= v <= low_cap):
            print(f"  [{tag}] LOW {name} = {v:.3f} outside [0.005, {low_cap:.3f}]")
            ok = False
    return ok


# ---------------------------------------------------------------------------
# Travel snapshot: 954 rows, 7 columns, fully observed.
# FrequentFlyer bands: AnnualIncomeClass/Target above 0.2; ServicesOpted and
# BookedHotelOrNot in (0.15, 0.2); Age and AccountSyncedToSocialMedia low.
# ---------------------------------------------------------------------------

def gen_travel(seed):
    rng = np.random.default_rng(seed)
    n = 954
    rows = []
    for _ in range(n):
        target = "1" if rng.random() < 0.24 else "0"
        age = int(np.clip(rng.normal(33, 7), 18, 60))
        aic = choice(rng, ["Low Income", "Middle Income", "High Income"], [0.5, 0.3, 0.2])
        so = int(np.clip(rng.geometric(0.38), 1, 6))
        asm = "Yes" if rng.random() < 0.4 else "No"
        bh = "Yes" if rng.random() < 0.45 else "No"

        z = -0.95
        z += {"Low Income": -0.85, "Middle Income": 0.45, "High Income": 1.55}[aic]
        z += 1.80 if target == "1" else 0.0
        z += 0.27 * (so - 2.6)
        z += 0.78 if bh == "Yes" else 0.0
        z += 0.018 * (age - 33)
        z += 0.38 if asm == "Yes" else 0.0
        ff = "Yes" if rng.random() < sigmoid(z) else "No"
        rows.append([target, age, ff, aic, so, asm, bh])

    names = ["Target", "Age", "FrequentFlyer", "AnnualIncomeClass", "ServicesOpted",
             "AccountSyncedToSocialMedia", "BookedHotelOrNot"]
    kinds = ["categorical", "numerical", "categorical", "categorical", "numerical",
             "categorical", "categorical"]
    columns = [[row[i] for row in rows] for i in range(len(names))]
    return names, kinds, columns, rows


def verify_travel(names, kinds, columns):
    strengths = profile_of(columns, kinds, names, "FrequentFlyer")
    print("travel FrequentFlyer profile:")
    for name, v in sorted(strengths.items(), key=lambda kv: -kv[1]):
        print(f"  {name:30s} {v:.4f}")

    ok = check_bands("travel", strengths,
                     top=["AnnualIncomeClass", "Target"],
                     mid=["ServicesOpted", "BookedHotelOrNot"],
                     low=["Age", "AccountSyncedToSocialMedia"],
                     top_cut=0.2, mid_cut=0.15, low_cap=0.11)

    values = sorted(strengths.values(), reverse=True)
    ev = elbow_value(values)
    print(f"  elbow value: {ev:.4f}")
    if not (0.155 <= ev <= 0.195):
        print("  [travel] elbow outside [0.155, 0.195]")
        ok = False

    above_02 = sum(1 for v in values if v > 0.2)
    above_015 = sum(1 for v in values if v > 0.15)
    if (above_02, above_015) != (2, 4):
        print(f"  [travel] retention counts wrong: >0.2 -> {above_02}, >0.15 -> {above_015}")
        ok = False

    minority = sum(1 for v in columns[0] if v == "1")
    print(f"  minority rows: {minority} ({minority / len(columns[0]):.3f})")
    if not (0.20 <= minority / len(columns[0]) <= 0.28):
        print("  [travel] minority share drifted")
        ok = False
    if minority < 140:
        ok = False
    return ok


# ---------------------------------------------------------------------------
# Income snapshot: 8000 rows, 15 columns, '?' gaps in workclass/occupation/
# native-country. Band plan per imputation feature (threshold counts at 0.1
# and 0.2 mirror the fractions 7/14-10/14-4/14 and 3/14-5/14-2/14).
# ---------------------------------------------------------------------------

EDU_LEVELS = ["10th", "11th", "HS-grad", "Some-college", "Assoc-voc", "Bachelors",
              "Masters", "Doctorate"]
EDU_PROBS = [0.05, 0.06, 0.32, 0.23, 0.07, 0.17, 0.06, 0.04]
EDU_NUM_BY_TIER = {0: 8, 1: 10, 2: 12, 3: 14}
EDU_TIER = {"10th": 0, "11th": 0, "HS-grad": 1, "Some-college": 1, "Assoc-voc": 2,
            "Bachelors": 2, "Masters": 3, "Doctorate": 3}

RACES = ["White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other"]
RACE_PROBS = [0.78, 0.10, 0.06, 0.03, 0.03]

COUNTRIES = ["United-States", "Mexico", "Philippines", "Germany", "Canada", "India",
             "England", "Cuba", "China", "South", "Puerto-Rico", "Italy"]
BASE_COUNTRY = [0.80, 0.065, 0.022, 0.018, 0.016, 0.016, 0.014, 0.012, 0.012, 0.008,
                0.008, 0.019]
COUNTRY_BY_RACE = {
    "White": [0.88, 0.02, 0.0, 0.03, 0.025, 0.0, 0.02, 0.0, 0.0, 0.0, 0.0, 0.025],
    "Black": [0.88, 0.02, 0.0, 0.0, 0.0, 0.0, 0.0, 0.055, 0.0, 0.0, 0.045, 0.0],
    "Asian-Pac-Islander": [0.12, 0.0, 0.36, 0.0, 0.0, 0.24, 0.0, 0.0, 0.17, 0.11, 0.0, 0.0],
    "Amer-Indian-Eskimo": [0.96, 0.04, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    "Other": [0.30, 0.48, 0.0, 0.0, 0.0, 0.0, 0.0, 0.08, 0.0, 0.0, 0.14, 0.0],
}

MARITALS = ["Married-civ-spouse", "Never-married", "Divorced", "Widowed", "Separated"]
RELATIONSHIPS = ["Husband", "Not-in-family", "Own-child", "Unmarried", "Wife",
                 "Other-relative"]

WORKCLASSES = ["Private", "Self-emp-not-inc", "Self-emp-inc", "Local-gov", "State-gov",
               "Federal-gov", "Without-pay"]
WORKCLASS_BY_TIER = {
    0: [0.92, 0.045, 0.003, 0.02, 0.007, 0.003, 0.002],
    1: [0.82, 0.08, 0.015, 0.045, 0.025, 0.015, 0.0],
    2: [0.58, 0.09, 0.065, 0.125, 0.085, 0.055, 0.0],
    3: [0.31, 0.07, 0.13, 0.21, 0.16, 0.12, 0.0],
}

OCCUPATIONS = ["Prof-specialty", "Exec-managerial", "Tech-support", "Adm-clerical",
               "Sales", "Craft-repair", "Other-service", "Machine-op-inspct",
               "Transport-moving", "Handlers-cleaners"]
OCC_BY_EDU = {
    "10th":         [0.005, 0.01, 0.005, 0.04, 0.07, 0.22, 0.26, 0.18, 0.12, 0.09],
    "11th":         [0.005, 0.015, 0.01, 0.06, 0.09, 0.22, 0.24, 0.16, 0.11, 0.08],
    "HS-grad":      [0.01, 0.04, 0.015, 0.12, 0.12, 0.28, 0.13, 0.13, 0.115, 0.05],
    "Some-college": [0.05, 0.13, 0.08, 0.24, 0.18, 0.12, 0.10, 0.05, 0.04, 0.01],
    "Assoc-voc":    [0.13, 0.11, 0.17, 0.13, 0.09, 0.23, 0.07, 0.035, 0.025, 0.01],
    "Bachelors":    [0.35, 0.32, 0.10, 0.08, 0.10, 0.022, 0.012, 0.007, 0.004, 0.003],
    "Masters":      [0.60, 0.29, 0.045, 0.025, 0.03, 0.005, 0.003, 0.002, 0.001, 0.001],
    "Doctorate":    [0.83, 0.12, 0.02, 0.01, 0.01, 0.005, 0.003, 0.001, 0.0005, 0.0005],
}
OCC_BY_WORKCLASS = {
    "Private": [0.07, 0.09, 0.05, 0.12, 0.13, 0.18, 0.13, 0.11, 0.07, 0.05],
    "Self-emp-not-inc": [0.08, 0.24, 0.005, 0.01, 0.26, 0.36, 0.02, 0.005, 0.015, 0.005],
    "Self-emp-inc": [0.14, 0.52, 0.01, 0.02, 0.24, 0.05, 0.01, 0.005, 0.003, 0.002],
    "Local-gov": [0.50, 0.11, 0.04, 0.17, 0.005, 0.05, 0.09, 0.005, 0.025, 0.005],
    "State-gov": [0.47, 0.17, 0.09, 0.21, 0.005, 0.025, 0.025, 0.003, 0.001, 0.001],
    "Federal-gov": [0.32, 0.26, 0.14, 0.22, 0.01, 0.02, 0.01, 0.005, 0.01, 0.005],
    "Without-pay": [0.01, 0.01, 0.0, 0.06, 0.06, 0.22, 0.34, 0.10, 0.10, 0.10],
}
OCC_WHITE_COLLAR = {"Prof-specialty", "Exec-managerial", "Tech-support"}


def gen_income(seed):
    rng = np.random.default_rng(seed)
    n = 8000
    rows = []
    for _ in range(n):
        age = int(np.clip(rng.normal(38.5, 13.0), 17, 90))
        education = choice(rng, EDU_LEVELS, EDU_PROBS)
        tier = EDU_TIER[education]
        ed_num = EDU_NUM_BY_TIER[tier] + int(rng.integers(-3, 4))
        race = choice(rng, RACES, RACE_PROBS)

        # native-country <- race (mixture with the base distribution)
        if rng.random() < 0.55:
            country = choice(rng, COUNTRIES, COUNTRY_BY_RACE[race])
        else:
            country = choice(rng, COUNTRIES, BASE_COUNTRY)
        immigrant = country != "United-States"
        sex = "Male" if rng.random() < (0.81 if immigrant else 0.635) else "Female"

        # marital <- age
        if age < 26:
            marital = choice(rng, MARITALS, [0.12, 0.80, 0.04, 0.0, 0.04])
        elif age < 40:
            marital = choice(rng, MARITALS, [0.52, 0.30, 0.13, 0.005, 0.045])
        else:
            marital = choice(rng, MARITALS, [0.60, 0.10, 0.21, 0.05, 0.04])

        # relationship <- marital, sex
        if marital == "Married-civ-spouse":
            relationship = "Husband" if sex == "Male" else "Wife"
            if rng.random() < 0.06:
                relationship = choice(rng, RELATIONSHIPS, [0.0, 0.4, 0.2, 0.2, 0.0, 0.2])
        elif marital == "Never-married":
            relationship = choice(rng, RELATIONSHIPS, [0.0, 0.38, 0.42, 0.12, 0.0, 0.08])
        else:
            relationship = choice(rng, RELATIONSHIPS, [0.0, 0.52, 0.06, 0.36, 0.0, 0.06])

        # hours <- sex with a small shift for immigrants
        hours = rng.normal(42 if sex == "Male" else 37.5, 9.5)
        if immigrant:
            hours += 3.1
        hours = int(np.clip(hours, 5, 99))

        fnlwgt = int(np.clip(rng.lognormal(12.0, 0.45), 20000, 1200000))

        # workclass <- education tier (mild), country (mild), hours, age
        wc_probs = np.asarray(WORKCLASS_BY_TIER[tier], dtype=float).copy()
        if immigrant:
            if rng.random() < 0.9:
                wc_probs = wc_probs * np.asarray([2.7, 2.0, 1.2, 0.11, 0.11, 0.06, 1.15])
        elif rng.random() < 0.36:
            wc_probs = wc_probs * np.asarray([0.85, 0.7, 0.9, 1.7, 1.7, 1.9, 0.8])
        if hours > 48 and rng.random() < 0.55:
            wc_probs = wc_probs * np.asarray([0.55, 3.4, 3.6, 0.45, 0.45, 0.45, 0.2])
        if age < 24 and rng.random() < 0.62:
            wc_probs = wc_probs * np.asarray([2.8, 0.12, 0.04, 0.35, 0.35, 0.12, 3.0])
        elif age > 52 and rng.random() < 0.45:
            wc_probs = wc_probs * np.asarray([0.55, 3.0, 2.6, 1.1, 1.1, 1.0, 0.8])
        workclass = choice(rng, WORKCLASSES, wc_probs)

        # occupation <- education level * workclass (log-linear), plus hours,
        #               age, sex, relationship, marital, education-num
        occ_probs = (np.asarray(OCC_BY_EDU[education], dtype=float) *
                     np.asarray(OCC_BY_WORKCLASS[workclass], dtype=float)) + 1e-4
        if rng.random() < 0.06:  # unstructured noise share
            occ_probs = np.asarray(
                [0.10, 0.11, 0.05, 0.12, 0.11, 0.14, 0.13, 0.09, 0.08, 0.07], dtype=float)
        if hours > 45:
            occ_probs = occ_probs * np.asarray(
                [1.7, 3.1, 0.9, 0.25, 1.35, 1.0, 0.35, 0.6, 1.7, 0.45])
        if age > 44 and rng.random() < 0.21:
            occ_probs = occ_probs * np.asarray(
                [1.5, 2.1, 0.45, 0.7, 0.9, 1.0, 0.65, 0.85, 1.25, 0.3])
        elif age < 27 and rng.random() < 0.34:
            occ_probs = occ_probs * np.asarray(
                [0.5, 0.35, 1.1, 1.3, 1.6, 0.9, 2.0, 1.1, 0.7, 1.9])
        if sex == "Female":
            occ_probs = occ_probs * np.asarray(
                [1.01, 0.855, 1.07, 1.54, 1.01, 0.52, 1.42, 0.93, 0.39, 0.72])
        if relationship in ("Own-child", "Other-relative"):
            occ_probs = occ_probs * np.asarray(
                [0.45, 0.35, 0.8, 1.1, 1.55, 0.8, 2.2, 1.1, 0.7, 2.0])
        if marital == "Married-civ-spouse" and rng.random() < 0.9:
            occ_probs = occ_probs * np.asarray(
                [1.6, 2.1, 0.85, 0.6, 0.95, 1.3, 0.35, 0.85, 1.1, 0.4])
        elif marital == "Never-married" and rng.random() < 0.5:
            occ_probs = occ_probs * np.asarray(
                [0.6, 0.45, 1.1, 1.3, 1.25, 0.9, 1.8, 1.05, 0.75, 1.7])
        if ed_num >= 13 and rng.random() < 0.33:
            occ_probs = occ_probs * np.asarray(
                [2.6, 1.8, 1.4, 0.6, 0.7, 0.25, 0.3, 0.15, 0.15, 0.1])
        occupation = choice(rng, OCCUPATIONS, occ_probs)

        # capital <- occupation and workclass
        white_collar = occupation in OCC_WHITE_COLLAR
        gain_p = 0.115 if white_collar else 0.035
        gain_p *= {"Private": 0.9, "Self-emp-not-inc": 1.8, "Self-emp-inc": 2.9,
                   "Local-gov": 1.05, "State-gov": 1.05, "Federal-gov": 1.4,
                   "Without-pay": 0.2}[workclass]
        if rng.random() < min(gain_p, 0.9):
            capital_gain = int(rng.lognormal(8.4, 0.9))
            capital_gain = min(capital_gain, 99999)
        else:
            capital_gain = 0
        capital_loss = int(rng.lognormal(7.4, 0.35)) if rng.random() < 0.045 else 0

        # income <- education, workclass, occupation, hours, capital, country, sex
        z = -2.75
        z += {0: -0.9, 1: -0.1, 2: 0.75, 3: 1.6}[tier]
        z += {"Private": 0.0, "Self-emp-not-inc": 0.25, "Self-emp-inc": 1.35,
              "Local-gov": 0.4, "State-gov": 0.4, "Federal-gov": 0.85,
              "Without-pay": -1.5}[workclass]
        z += {"Prof-specialty": 0.62, "Exec-managerial": 0.85, "Tech-support": 0.38,
              "Adm-clerical": -0.1, "Sales": 0.18, "Craft-repair": 0.0,
              "Other-service": -0.78, "Machine-op-inspct": -0.3,
              "Transport-moving": -0.07, "Handlers-cleaners": -0.6}[occupation]
        z += 0.035 * (hours - 40)
        z += 0.9 if capital_gain > 4000 else 0.0
        z += 1.55 if immigrant else 0.0
        z += 0.30 if sex == "Male" else 0.0
        income = ">50K" if rng.random() < sigmoid(z) else "<=50K"

        rows.append([age, workclass, fnlwgt, education, ed_num, marital, occupation,
                     relationship, race, sex, capital_gain, capital_loss, hours,
                     country, income])

    names = ["age", "workclass", "fnlwgt", "education", "education-num",
             "marital-status", "occupation", "relationship", "race", "sex",
             "capital-gain", "capital-loss", "hours-per-week", "native-country",
             "income"]
    kinds = ["numerical", "categorical", "numerical", "categorical", "numerical",
             "categorical", "categorical", "categorical", "categorical", "categorical",
             "numerical", "numerical", "numerical", "categorical", "categorical"]

    # '?' gaps: 60 rows missing both workclass and occupation, then disjoint
    # feature-only blocks (workclass 290, occupation 330, native-country 300).
    order = rng.permutation(n)
    co = order[:60]
    w_only = order[60:290]
    o_only = order[290:560]
    nc_only = order[560:860]
    wc_col = names.index("workclass")
    occ_col = names.index("occupation")
    nc_col = names.index("native-country")
    for r in co:
        rows[r][wc_col] = None
        rows[r][occ_col] = None
    for r in w_only:
        rows[r][wc_col] = None
    for r in o_only:
        rows[r][occ_col] = None
    for r in nc_only:
        rows[r][nc_col] = None

    columns = [[row[i] for row in rows] for i in range(len(names))]
    return names, kinds, columns, rows


INCOME_BANDS = {
    "workclass": {
        "top": ["education-num", "occupation", "income"],
        "mid": ["education", "capital-gain", "hours-per-week", "age"],
    },
    "occupation": {
        "top": ["education", "education-num", "workclass", "income", "hours-per-week"],
        "mid": ["age", "sex", "relationship", "marital-status", "capital-gain"],
    },
    "native-country": {
        "top": ["race", "income"],
        "mid": ["sex", "hours-per-week"],
    },
}


def verify_income(names, kinds, columns):
    # The target is dispatched as categorical by the library; it already is here.
    ok = True
    profiles = {}
    for feature, bands in INCOME_BANDS.items():
        strengths = profile_of(columns, kinds, names, feature)
        profiles[feature] = strengths
        print(f"income {feature} profile:")
        for name, v in sorted(strengths.items(), key=lambda kv: -kv[1]):
            print(f"  {name:20s} {v:.4f}")
        low = [n for n in strengths if n not in bands["top"] and n not in bands["mid"]]
        ok &= check_bands(feature, strengths, bands["top"], bands["mid"], low,
                          top_cut=0.2, mid_cut=0.1, low_cap=0.088)
        above_02 = sum(1 for v in strengths.values() if v > 0.2)
        above_01 = sum(1 for v in strengths.values() if v > 0.1)
        want = {"workclass": (3, 7), "occupation": (5, 10), "native-country": (2, 4)}[feature]
        if (above_02, above_01) != want:
            print(f"  [{feature}] retention counts {above_02}/{above_01}, want {want}")
            ok = False

    occ_values = sorted(profiles["occupation"].values(), reverse=True)
    ev = elbow_value(occ_values)
    print(f"income occupation elbow value: {ev:.4f}")
    if not (0.16 <= ev <= 0.24):
        print("  [income] occupation elbow outside [0.16, 0.24]")
        ok = False

    target_col = columns[names.index("income")]
    minority = sum(1 for v in target_col if v == ">50K")
    print(f"income minority rows: {minority} ({minority / len(target_col):.3f})")
    if not (0.18 <= minority / len(target_col) <= 0.30):
        print("  [income] minority share drifted")
        ok = False

    # missing-count ordering drives the relevance tie-break: workclass < occupation
    wc_missing = sum(1 for v in columns[names.index("workclass")] if v is None)
    occ_missing = sum(1 for v in columns[names.index("occupation")] if v is None)
    nc_missing = sum(1 for v in columns[names.index("native-country")] if v is None)
    print(f"income missing: workclass={wc_missing} occupation={occ_missing} "
          f"native-country={nc_missing}")
    if not (wc_missing < nc_missing < occ_missing):
        print("  [income] missing-count ordering broken")
        ok = False
    return ok


INCOME_DESCRIPTIONS = {
    "age": "age of the individual in years",
    "workclass": "type of employer such as private or government",
    "fnlwgt": "census sampling weight of the record",
    "education": "highest completed level of education",
    "education-num": "years of education as a number",
    "marital-status": "marital status of the individual",
    "occupation": "occupation category of the individual",
    "relationship": "household relationship of the individual",
    "race": "race of the individual",
    "sex": "sex of the individual",
    "capital-gain": "capital gains recorded for the individual",
    "capital-loss": "capital losses recorded for the individual",
    "hours-per-week": "usual working hours per week",
    "native-country": "country of origin of the individual",
    "income": "whether yearly income exceeds 50K",
}

TRAVEL_DESCRIPTIONS = {
    "Target": "whether the customer churns from the tour and travels company",
    "Age": "the age of customer",
    "FrequentFlyer": "whether customer takes frequent flights",
    "AnnualIncomeClass": "class of annual income of user",
    "ServicesOpted": "number of times services opted during recent years",
    "AccountSyncedToSocialMedia": "whether company account of user synchronised to their social media",
    "BookedHotelOrNot": "whether the user booked a hotel through the company",
}


def write_schema(path, names, kinds, target, descriptions):
    doc = []
    for name, kind in zip(names, kinds):
        doc.append({
            "name": name,
            "kind": kind,
            "description": descriptions[name],
            "role": "target" if name == target else "feature",
        })
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def main():
    os.makedirs(OUT_DIR, exist_ok=True)

    t_names, t_kinds, t_cols, t_rows = gen_travel(seed=20250810)
    ok = verify_travel(t_names, t_kinds, t_cols)

    i_names, i_kinds, i_cols, i_rows = gen_income(seed=20250811)
    ok &= verify_income(i_names, i_kinds, i_cols)

    if not ok:
        print("\nconstraints not met; adjust coefficients and rerun")
        return 1

    write_csv(os.path.join(OUT_DIR, "travel.csv"), t_names, t_rows)
    write_schema(os.path.join(OUT_DIR, "travel.schema.json"), t_names, t_kinds,
                 "Target", TRAVEL_DESCRIPTIONS)
    write_csv(os.path.join(OUT_DIR, "adult_income.csv"), i_names, i_rows, missing="?")
    write_schema(os.path.join(OUT_DIR, "adult_income.schema.json"), i_names, i_kinds,
                 "income", INCOME_DESCRIPTIONS)
    print("\nsnapshots written to", os.path.abspath(OUT_DIR))
    return 0


if __name__ == "__main__":
    sys.exit(main())
