"""Durable artifacts: witness databases, sweep checkpoints, CSV tables.

Everything is written atomically (temp file in the same directory, then
rename), so an interrupted run never leaves a truncated artifact behind.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile

from .engine import Witness, witness_from_record, witness_record
from .graphs import CanonicalForm, Graph, canonical_form, parse_graph6, to_graph6
from .search import SweepState, SweepStats
from .trees import reduced_centipede

CHECKPOINT_FORMAT_VERSION = 1


class CheckpointError(Exception):
    """Checkpoint cannot be trusted: bad checksum, version, or config."""


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Witness databases: JSON-lines sorted by graph6 key
# ---------------------------------------------------------------------------

def write_witness_db(path: str, items) -> None:
    """items: iterable of (Graph, Witness); records land sorted by graph6 key."""
    records = sorted((witness_record(g, w) for g, w in items),
                     key=lambda r: (len(r["graph"]), r["graph"]))
    atomic_write_text(path, "".join(_dumps(r) + "\n" for r in records))


def read_witness_db(path: str) -> list[tuple[Graph, Witness]]:
    out = []
    with open(path) as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(witness_from_record(json.loads(line)))
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad witness record: {exc}") from exc
    return out


def write_witness_csv(path: str, items) -> int:
    """Companion table: graph6, n, weight vector, d_min, d_max.

    Covers integer centipede witnesses only (the published per-graph format);
    returns how many rows were written, skipping anything else.
    """
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["graph6", "n", "weights", "d_min", "d_max"])
    rows = 0
    for g, wit in items:
        n = wit.tree.n_leaves
        if not (wit.is_integral() and n >= 3
                and wit.tree.shape == reduced_centipede(n)):
            continue
        writer.writerow([to_graph6(g), n,
                         " ".join(str(int(w)) for w in wit.tree.weights),
                         int(wit.d_min), int(wit.d_max)])
        rows += 1
    atomic_write_text(path, buf.getvalue())
    return rows


# ---------------------------------------------------------------------------
# Sweep checkpoints
# ---------------------------------------------------------------------------

def _state_payload(state: SweepState) -> dict:
    covered = sorted(
        (witness_record(cf.graph(), wit) for cf, wit in state.covered.items()),
        key=lambda r: (len(r["graph"]), r["graph"]))
    return {
        "n": state.n,
        "max_weight": state.max_weight,
        "completed_weight": state.completed_weight,
        "next_rank": state.next_rank,
        "cursor_vector": list(state.cursor_vector() or ()),
        "stats": {
            "vectors_examined": state.stats.vectors_examined,
            "threshold_pairs": state.stats.threshold_pairs,
            "canonicalizations": state.stats.canonicalizations,
        },
        "covered": covered,
    }


def save_checkpoint(path: str, state: SweepState, config: dict) -> None:
    payload = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "config": config,
        "state": _state_payload(state),
    }
    digest = hashlib.sha256(_dumps(payload).encode()).hexdigest()
    atomic_write_text(path, _dumps({**payload, "checksum": digest}) + "\n")


def load_checkpoint(path: str, config: dict) -> SweepState:
    """Reload a checkpoint, refusing anything inconsistent or tampered with."""
    try:
        with open(path) as handle:
            obj = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable checkpoint: {exc}") from exc
    declared = obj.pop("checksum", None)
    digest = hashlib.sha256(_dumps(obj).encode()).hexdigest()
    if declared != digest:
        raise CheckpointError(f"{path}: checksum mismatch, refusing to resume")
    if obj.get("format_version") != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format version {obj.get('format_version')} is not "
            f"{CHECKPOINT_FORMAT_VERSION}")
    if obj.get("config") != config:
        raise CheckpointError(
            f"{path}: checkpoint config {obj.get('config')} does not match "
            f"this run's {config}")
    st = obj["state"]
    covered: dict[CanonicalForm, Witness] = {}
    for rec in st["covered"]:
        g, wit = witness_from_record(rec)
        cf = canonical_form(g)
        if cf.graph() != g:
            raise CheckpointError(
                f"{path}: stored class {rec['graph']} is not canonically labeled")
        covered[cf] = wit
    stats = SweepStats(**st["stats"])
    return SweepState(n=int(st["n"]), max_weight=int(st["max_weight"]),
                      covered=covered, completed_weight=int(st["completed_weight"]),
                      next_rank=int(st["next_rank"]), stats=stats)
