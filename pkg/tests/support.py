"""Shared generators for synthetic rainfall data and random datasets."""

import random

from croptree import Dataset, LabeledInstance, StationYear

# Month layouts per climate class: W wet, M moist, D dry.  Each layout's
# wet/dry runs land squarely inside one Oldeman cell, and the sampling
# bands below keep every month far from the 100/200 mm boundaries.
TEMPLATES = {
    "A1": "W" * 12,
    "A2": "W" * 10 + "D" * 2,
    "B2": "W" * 8 + "M" + "D" * 3,
    "B3": "W" * 7 + "D" * 5,
    "C3": "W" * 5 + "M" * 2 + "D" * 5,
    "C4": "W" * 5 + "D" * 7,
}

BANDS = {"W": (260.0, 340.0), "M": (130.0, 170.0), "D": (20.0, 80.0)}


def make_stations(n=75, seed=7, year=2013):
    """Synthetic stations with well-separated rainfall regimes."""
    rng = random.Random(seed)
    types = sorted(TEMPLATES)
    records = []
    for i in range(n):
        shape = TEMPLATES[types[i % len(types)]]
        rainfall = tuple(round(rng.uniform(*BANDS[ch]), 1) for ch in shape)
        region = "DKI Jakarta" if i % 2 else "Banten"
        records.append(StationYear(f"ST{i:03d}", region, year, rainfall))
    return records


def random_dataset(rng, max_instances=25, n_attrs=4, classes=("X", "Y", "Z"),
                   missing_prob=0.15, value_pool=None):
    """A random labeled dataset; values repeat often so splits get ties."""
    n = rng.randint(1, max_instances)
    names = tuple(f"a{j}" for j in range(n_attrs))
    instances = []
    for i in range(n):
        feats = []
        for _ in range(n_attrs):
            if rng.random() < missing_prob:
                feats.append(None)
            elif value_pool is not None:
                feats.append(rng.choice(value_pool))
            else:
                feats.append(round(rng.uniform(0.0, 400.0), 1))
        instances.append(LabeledInstance(tuple(feats), rng.choice(classes),
                                         provenance_id=f"r{i}"))
    return Dataset(names, tuple(classes), tuple(instances))


def random_consistent_dataset(rng, max_instances=15, n_attrs=3,
                              classes=("X", "Y", "Z")):
    """Random dataset with no missing values and no duplicated feature
    vector carrying two different labels."""
    n = rng.randint(1, max_instances)
    names = tuple(f"a{j}" for j in range(n_attrs))
    seen = {}
    instances = []
    for i in range(n):
        feats = tuple(float(rng.choice((0, 50, 100, 200, 400)))
                      for _ in range(n_attrs))
        label = seen.setdefault(feats, rng.choice(classes))
        instances.append(LabeledInstance(feats, label, provenance_id=f"r{i}"))
    return Dataset(names, tuple(classes), tuple(instances))


def random_feature_vector(rng, n_attrs, missing_prob=0.25):
    return tuple(None if rng.random() < missing_prob
                 else round(rng.uniform(-50.0, 450.0), 2)
                 for _ in range(n_attrs))
