"""Deterministic CSV / JSON emission and file readers.

Floats are written with 17 significant digits (``%.17g``), lines end in
``\\n``, files are UTF-8. Complex numbers in JSON documents are
``[re, im]`` pairs.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .lattice import LatticeState, ScaledDistribution
from .symbol import LaurentMatrixSymbol, walk_from_spec

__all__ = [
    "format_value",
    "emit_csv",
    "distribution_rows",
    "write_distribution_csv",
    "write_measure_csv",
    "write_field_csv",
    "write_convergence_csv",
    "write_json",
    "state_to_dict",
    "state_from_dict",
    "read_state",
    "write_state",
    "read_walk",
]


def format_value(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0.0:
            x = 0.0  # no "-0"
        return "%.17g" % x
    raise TypeError(f"cannot format {type(x).__name__} for CSV")


def emit_csv(records: Iterable, schema: Sequence[str], path, comments: Sequence[str] = ()) -> Path:
    """Write ``records`` (sequences or mappings) under the header ``schema``.

    Each ``comments`` entry is appended as a trailing ``# ...`` line.
    """
    path = Path(path)
    schema = list(schema)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(schema)
        for i, rec in enumerate(records):
            if isinstance(rec, Mapping):
                if set(rec) != set(schema):
                    raise ValueError(f"record {i} keys {sorted(rec)} do not match schema {schema}")
                row = [rec[c] for c in schema]
            else:
                row = list(rec)
                if len(row) != len(schema):
                    raise ValueError(f"record {i} has {len(row)} fields, schema has {len(schema)}")
            writer.writerow([format_value(v) for v in row])
        for line in comments:
            fh.write(f"# {line}\n")
    return path


def distribution_rows(dist: ScaledDistribution):
    v = dist.velocities
    for site_v, mass in zip(v, dist.masses):
        yield [dist.t, *[float(x) for x in site_v], float(mass)]


def write_distribution_csv(dists: Sequence[ScaledDistribution], path) -> Path:
    d = dists[0].d
    schema = ["t"] + [f"v{i}" for i in range(1, d + 1)] + ["mass"]
    rows = (row for dist in dists for row in distribution_rows(dist))
    return emit_csv(rows, schema, path)


def write_measure_csv(measure, path) -> Path:
    schema = [f"v{i}" for i in range(1, measure.d + 1)] + ["weight"]
    rows = ([*map(float, v), float(w)] for v, w in zip(measure.velocities, measure.weights))
    return emit_csv(rows, schema, path,
                    comments=[f"unresolved_mass={format_value(float(measure.unresolved_mass))}"])


def write_field_csv(points: np.ndarray, entries: Mapping[str, np.ndarray], path) -> Path:
    """One row per (grid point, entry label); entries map labels to (P,) arrays."""
    d = points.shape[1]
    schema = [f"k{i}" for i in range(1, d + 1)] + ["band_or_entry", "value_re", "value_im"]
    labels = list(entries)

    def rows():
        for p, k in enumerate(points):
            for lab in labels:
                z = complex(entries[lab][p])
                yield [*map(float, k), lab, z.real, z.imag]

    return emit_csv(rows(), schema, path)


def write_convergence_csv(records, path) -> Path:
    schema = ["t", "pointwise_err", "sup_err", "excluded_fraction"]
    rows = ([r.t, r.pointwise_err, r.sup_err, r.excluded_fraction] for r in records)
    return emit_csv(rows, schema, path)


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _pair(z) -> list:
    return [float(z.real), float(z.imag)]


def state_to_dict(state: LatticeState) -> dict:
    return {
        "d": state.d,
        "n": state.n,
        "amplitudes": [
            {"site": list(site), "vector": [_pair(z) for z in vec]}
            for site, vec in state.items()
        ],
    }


def state_from_dict(doc: Mapping) -> LatticeState:
    extra = set(doc) - {"d", "n", "amplitudes"}
    if extra:
        raise ValueError(f"unknown state keys: {sorted(extra)}")
    d, n = int(doc["d"]), int(doc["n"])
    sites = {}
    for entry in doc["amplitudes"]:
        site = tuple(int(v) for v in entry["site"])
        if len(site) != d:
            raise ValueError(f"site {site} does not have dimension {d}")
        vec = np.array([complex(re, im) for re, im in entry["vector"]])
        sites[site] = sites.get(site, 0) + vec
    return LatticeState.from_sites(sites, n=n)


def read_state(path) -> LatticeState:
    return state_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_state(state: LatticeState, path) -> Path:
    return write_json(state_to_dict(state), path)


def read_walk(path) -> LaurentMatrixSymbol:
    return walk_from_spec(json.loads(Path(path).read_text(encoding="utf-8")))
