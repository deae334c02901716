"""Writes argon2_configs.csv: a synthetic 161-repository Argon2 parameter survey.

Per-label marginals over age, software type and star class are fixed; the joint
table is annealed so the secondary cross-tabulations come out close to the
reference statistics listed in TARGETS.
"""
import csv
import math
import random
import sys

random.seed(2025)

AGES = ["<=2018", "2019-2021", "2022-2024"]
TYPES = ["sensitive_application", "application", "component"]
STARS = ["3-4", "5-10", "11-30", ">30"]

MARGINS = {
    "weaker": {"age": [38, 23, 14], "type": [4, 6, 65], "stars": [13, 12, 28, 22]},
    "stronger": {"age": [25, 33, 28], "type": [11, 16, 59], "stars": [25, 22, 17, 22]},
}
# age x stars, age x app/component, stars x app/component
TARGETS = {"age_stars": 32.53, "age_kind": 20.25, "stars_kind": 3.41}

CLUSTERS = {
    "weaker": [((3, 4096), 33), ((1, 16384), 8), ((2, 8192), 7), ((3, 8192), 6), ((1, 32768), 6),
               ((4, 4096), 5), ((2, 15360), 4), ((1, 4096), 3), ((10, 1024), 2), ((3, 1024), 1)],
    "stronger": [((3, 65536), 28), ((2, 19456), 11), ((1, 65536), 10), ((2, 65536), 9), ((4, 65536), 7),
                 ((3, 262144), 6), ((1, 2097152), 5), ((3, 131072), 4), ((1, 102400), 3), ((2, 1048576), 2),
                 ((5, 7168), 1)],
}


def chi2(table):
    rows = [sum(r) for r in table]
    cols = [sum(c) for c in zip(*table)]
    n = sum(rows)
    s = 0.0
    for i, r in enumerate(table):
        for j, o in enumerate(r):
            e = rows[i] * cols[j] / n
            if e > 0:
                s += (o - e) ** 2 / e
    return s


def cross(people, a, b, na, nb, fb=None):
    t = [[0] * nb for _ in range(na)]
    for p in people:
        t[p[a]][fb(p[b]) if fb else p[b]] += 1
    return t


def kind(type_index):
    return 0 if type_index < 2 else 1


def score(people):
    e = abs(chi2(cross(people, "age", "stars", 3, 4)) - TARGETS["age_stars"])
    e += abs(chi2(cross(people, "age", "type", 3, 2, kind)) - TARGETS["age_kind"])
    e += abs(chi2(cross(people, "stars", "type", 4, 2, kind)) - TARGETS["stars_kind"])
    return e


def expand(counts):
    return [i for i, c in enumerate(counts) for _ in range(c)]


def main(out_path):
    people = []
    for label, m in MARGINS.items():
        ages, types, stars = expand(m["age"]), expand(m["type"]), expand(m["stars"])
        random.shuffle(types)
        random.shuffle(stars)
        people += [{"label": label, "age": a, "type": t, "stars": s} for a, t, s in zip(ages, types, stars)]

    # Swapping one attribute between two repos of the same label keeps every margin.
    cur = score(people)
    temp = 5.0
    for _ in range(200000):
        i, j = random.randrange(len(people)), random.randrange(len(people))
        if people[i]["label"] != people[j]["label"]:
            continue
        key = random.choice(["type", "stars"])
        people[i][key], people[j][key] = people[j][key], people[i][key]
        s = score(people)
        if s <= cur or random.random() < math.exp((cur - s) / temp):
            cur = s
        else:
            people[i][key], people[j][key] = people[j][key], people[i][key]
        temp = max(1e-3, temp * 0.99995)

    for label in MARGINS:
        configs = [tm for tm, n in CLUSTERS[label] for _ in range(n)]
        group = [p for p in people if p["label"] == label]
        assert len(configs) == len(group), (label, len(configs), len(group))
        random.shuffle(configs)
        for p, tm in zip(group, configs):
            p["t"], p["m"] = tm

    years = {0: range(2013, 2019), 1: range(2019, 2022), 2: range(2022, 2025)}
    star_ranges = {0: (3, 4), 1: (5, 10), 2: (11, 30), 3: (31, 900)}
    random.shuffle(people)
    with open(out_path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["source_label", "t", "memory_kib", "p", "category", "stars", "created_year"])
        for k, p in enumerate(people):
            lo, hi = star_ranges[p["stars"]]
            w.writerow([f"repo-{k + 1:03d}", p["t"], p["m"], random.choice([1, 1, 1, 2, 4]),
                        TYPES[p["type"]], random.randint(lo, hi), random.choice(list(years[p["age"]]))])
    print("residual", round(cur, 3),
          round(chi2(cross(people, "age", "stars", 3, 4)), 2),
          round(chi2(cross(people, "age", "type", 3, 2, kind)), 2),
          round(chi2(cross(people, "stars", "type", 4, 2, kind)), 2))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "argon2_configs.csv")
