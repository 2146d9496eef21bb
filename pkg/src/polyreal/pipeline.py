"""End-to-end classification of simplicial spheres and the batch ledger."""

from __future__ import annotations

import hashlib
import json
import logging
import re
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .certify import BfpCertificate, certify_nonrealizable, complete, gp_propagate, verify_certificate
from .core import Chirotope, RationalConfiguration
from .errors import Contradiction, InconsistentOrientation, NotUniform, PolyrealError
from .exact import rationalize_config, verify
from .solver import DEFAULT_BOUND, DEFAULT_EPSILON, Budget, build_face_system, build_full_system, solve_feasibility
from .sphere import PartialChirotope, SimplicialSphere, load_sphere, partial_from_sphere, sphere_from_facets

log = logging.getLogger(__name__)

STATUSES = ("inscribed", "realized", "nonrealizable", "no_compatible_chirotope", "undecided")
INSCRIBE_SHARE = 0.6


@dataclass
class ClassifyOptions:
    epsilon: float = DEFAULT_EPSILON
    restarts: int = 20
    iterations: int = 2000
    seed: int = 0
    coordinate_bound: float = DEFAULT_BOUND
    pin_north_pole: bool = False
    time_budget: float | None = None  # wall seconds for both solver stages
    completion_cap: int = 10_000
    node_cap: int = 10_000_000
    skip_inscribed: bool = False

    @classmethod
    def from_mapping(cls, data: dict) -> "ClassifyOptions":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown option keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class LedgerRecord:
    instance_id: str
    input_hash: str
    status: str
    facets: list[list[int]]
    coordinates: list[list[str]] | None = None
    certificate: dict | None = None
    seed: int = 0
    timings: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "LedgerRecord":
        return cls(**json.loads(line))


# ---------------------------------------------------------------------------
# classification


def _realize_stage(sphere, partial, inscribed: bool, opts: ClassifyOptions, time_limit):
    problem = build_face_system(sphere, partial, inscribed=inscribed, epsilon=opts.epsilon,
                                coordinate_bound=opts.coordinate_bound)
    budget = Budget(opts.restarts, opts.iterations, time_limit)
    outcome = solve_feasibility(problem, budget, seed=opts.seed, pin_north_pole=opts.pin_north_pole)
    info = {"restarts": outcome.restarts_used, "residual": outcome.residual}
    if not outcome.feasible:
        return None, info
    config, _ = rationalize_config(outcome.config, inscribed, sphere)
    return config, info


def realize(chi: Chirotope, options: ClassifyOptions | None = None, inscribed: bool = False):
    """Exact rational configuration with chirotope ``chi``, or None within budget.

    The sign of the whole chirotope is free, so both ``chi`` and its negation
    are accepted as targets.
    """
    if not chi.is_uniform:
        raise NotUniform("realize needs a uniform chirotope")
    opts = options or ClassifyOptions()
    problem = build_full_system(chi, inscribed, opts.epsilon, opts.coordinate_bound)
    budget = Budget(opts.restarts, opts.iterations, opts.time_budget)
    outcome = solve_feasibility(problem, budget, seed=opts.seed, pin_north_pole=opts.pin_north_pole)
    if not outcome.feasible:
        return None, outcome
    config, _ = rationalize_config(outcome.config, inscribed, chi)
    return config, outcome


def _certificate_payload(verdict) -> dict:
    if verdict.kind == "bfp_on_partial":
        signs, cert = verdict.certificates[0]
        return {"kind": verdict.kind, "signs": signs.to_text(), "certificate": cert.to_json()}
    return {
        "kind": verdict.kind,
        "completions": [{"signs": chi.to_text(), "certificate": cert.to_json()} for chi, cert in verdict.certificates],
    }


def classify(sphere: SimplicialSphere, options: ClassifyOptions | None = None, instance_id: str = "") -> LedgerRecord:
    """Inscribe, else realize, else certify non-realizability, else undecided.

    Positive answers are only returned after exact verification.
    """
    opts = options or ClassifyOptions()
    record = LedgerRecord(instance_id or sphere.digest()[:12], sphere.digest(), "undecided",
                          [list(f) for f in sphere.facets], seed=opts.seed)
    start = time.monotonic()
    try:
        partial = partial_from_sphere(sphere)
    except PolyrealError as exc:
        partial = None
        record.detail["partial_error"] = str(exc)
    stages = [] if opts.skip_inscribed else [("inscribed", True)]
    stages.append(("realized", False))
    for status, inscribed in stages if partial is not None else []:
        t0 = time.monotonic()
        limit = None
        if opts.time_budget is not None:
            share = INSCRIBE_SHARE if inscribed else 1.0
            limit = max(0.0, (opts.time_budget - (t0 - start)) * share)
        try:
            config, info = _realize_stage(sphere, partial, inscribed, opts, limit)
        except (PolyrealError, ValueError) as exc:
            config, info = None, {"error": f"{type(exc).__name__}: {exc}"}
        record.timings[status] = round(time.monotonic() - t0, 4)
        record.detail[status] = info
        if config is not None:
            record.status = status
            record.coordinates = config.to_json()
            record.timings["total"] = round(time.monotonic() - start, 4)
            return record
    t0 = time.monotonic()
    try:
        verdict = certify_nonrealizable(sphere, cap=opts.completion_cap, node_cap=opts.node_cap)
    except (PolyrealError, ValueError) as exc:
        verdict = None
        record.detail["certify_error"] = f"{type(exc).__name__}: {exc}"
    record.timings["certify"] = round(time.monotonic() - t0, 4)
    if verdict is not None:
        record.detail["certify"] = {"kind": verdict.kind, **verdict.diagnostics}
        if verdict.kind == "no_compatible_chirotope":
            record.status = "no_compatible_chirotope"
            record.certificate = {"kind": "witness", "witness": verdict.witness or {}}
        elif verdict.kind in ("bfp_on_partial", "bfp_on_all_completions"):
            record.status = "nonrealizable"
            record.certificate = _certificate_payload(verdict)
    record.timings["total"] = round(time.monotonic() - start, 4)
    return record


def replay(record: LedgerRecord) -> bool:
    """Re-derive the stored status from the stored payload in exact arithmetic."""
    if not record.facets:
        # unparseable input: nothing beyond "undecided" can have been claimed
        return record.status == "undecided"
    try:
        sphere = sphere_from_facets(record.facets)
    except PolyrealError:
        return False
    if record.input_hash != sphere.digest():
        return False
    if record.status in ("inscribed", "realized"):
        if record.coordinates is None:
            return False
        config = RationalConfiguration.from_json(record.coordinates)
        return verify(config, sphere, inscribed=record.status == "inscribed").positive
    if record.status == "nonrealizable":
        return _replay_certificates(sphere, record.certificate or {})
    if record.status == "no_compatible_chirotope":
        payload = record.certificate or {}
        if payload.get("kind") != "witness":
            return False
        return _replay_witness(sphere, payload.get("witness", {}))
    return record.status == "undecided"


def _replay_witness(sphere: SimplicialSphere, witness: dict) -> bool:
    kind = witness.get("kind")
    try:
        partial = partial_from_sphere(sphere)
    except InconsistentOrientation:
        return kind == "inconsistent_orientation"
    try:
        forced = gp_propagate(partial)
    except Contradiction as exc:
        t = exc.triple
        return kind == "contradiction" and [list(t.lam), list(t.quad)] == [witness.get("lambda"), witness.get("quad")]
    return kind == "no_completion" and complete(forced, cap=1).status == "no_completion"


def _same_up_to_sign(a, b) -> bool:
    return a.signs == b.signs or a.signs == tuple(-v for v in b.signs)


def _replay_certificates(sphere: SimplicialSphere, payload: dict) -> bool:
    forced = gp_propagate(partial_from_sphere(sphere))
    if payload.get("kind") == "bfp_on_partial":
        signs = PartialChirotope.from_text(payload["signs"])
        if not _same_up_to_sign(signs, forced):
            return False
        return verify_certificate(BfpCertificate.from_json(payload["certificate"]), signs)
    if payload.get("kind") == "bfp_on_all_completions":
        stored = [Chirotope.from_text(item["signs"]) for item in payload["completions"]]
        result = complete(forced)
        if result.truncated:
            return False
        expected = {c.normalized().signs for c in result.completions}
        if expected != {c.signs for c in stored}:
            return False
        return all(
            verify_certificate(BfpCertificate.from_json(item["certificate"]), chi)
            for item, chi in zip(payload["completions"], stored)
        )
    return False


# ---------------------------------------------------------------------------
# corpora and the batch ledger

_LABELLED = re.compile(r"^\s*([^\s\[{:=]+)?\s*[:=]?\s*(\[.*)$")


def read_corpus(path: str | Path) -> list[tuple[str, str]]:
    """(instance id, facet-list text) pairs from a corpus file.

    Each non-blank, non-comment line is either a JSON object with a
    ``facets`` key (and optional ``id``) or an optional label followed by a
    bracketed facet list.
    """
    items = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("{"):
            data = json.loads(stripped)
            ident = str(data.get("id", f"line{lineno}"))
            items.append((ident, json.dumps({k: data[k] for k in ("n", "d", "facets") if k in data})))
            continue
        m = _LABELLED.match(stripped)
        if m is None:
            items.append((f"line{lineno}", stripped))
        else:
            items.append((m.group(1) or f"line{lineno}", m.group(2)))
    return items


def read_ledger(path: str | Path) -> list[LedgerRecord]:
    path = Path(path)
    if not path.exists():
        return []
    records = []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        try:
            records.append(LedgerRecord.from_json(line))
        except (json.JSONDecodeError, TypeError):
            # torn trailing write from an interrupted run
            log.warning("skipping unreadable ledger line")
    return records


def _repair_tail(path: Path) -> None:
    """Drop an unterminated last line so appends start on a fresh line."""
    if not path.exists() or path.stat().st_size == 0:
        return
    data = path.read_bytes()
    if data.endswith(b"\n"):
        return
    cut = data.rfind(b"\n") + 1
    log.warning("truncating torn ledger tail (%d bytes)", len(data) - cut)
    with open(path, "r+b") as fh:
        fh.truncate(cut)


def instance_seed(batch_seed: int, input_hash: str) -> int:
    digest = hashlib.sha256(f"{batch_seed}:{input_hash}".encode()).hexdigest()
    return int(digest[:8], 16)


def _input_hash(text: str) -> tuple[str, SimplicialSphere | None, str | None]:
    try:
        sphere = load_sphere(text)
    except PolyrealError as exc:
        return hashlib.sha256(text.strip().encode()).hexdigest(), None, f"{type(exc).__name__}: {exc}"
    return sphere.digest(), sphere, None


def _run_instance(args) -> LedgerRecord:
    ident, text, opts = args
    digest, sphere, error = _input_hash(text)
    if sphere is None:
        return LedgerRecord(ident, digest, "undecided", [], seed=opts.seed, detail={"error": error})
    try:
        return classify(sphere, opts, instance_id=ident)
    except Exception as exc:  # noqa: BLE001 - a failing instance must not stop the batch
        return LedgerRecord(ident, digest, "undecided", [list(f) for f in sphere.facets], seed=opts.seed,
                            detail={"error": f"{type(exc).__name__}: {exc}"})


def run_batch(corpus: str | Path, ledger: str | Path, jobs: int = 1, seed: int = 0,
              options: ClassifyOptions | None = None) -> dict:
    """Classify every corpus instance not yet in the ledger, appending one record each."""
    base = options or ClassifyOptions()
    ledger = Path(ledger)
    _repair_tail(ledger)
    done = {r.input_hash for r in read_ledger(ledger)}
    todo = []
    skipped = 0
    queued = set()
    for ident, text in read_corpus(corpus):
        digest, _, _ = _input_hash(text)
        if digest in done or digest in queued:
            skipped += 1
            continue
        queued.add(digest)
        opts = ClassifyOptions(**{**asdict(base), "seed": instance_seed(seed, digest)})
        todo.append((ident, text, opts))
    counts: Counter = Counter()
    ledger.parent.mkdir(parents=True, exist_ok=True)
    with open(ledger, "a") as out:
        for record in _map(todo, jobs):
            out.write(record.to_json() + "\n")
            out.flush()
            counts[record.status] += 1
    return {"processed": len(todo), "skipped": skipped, "statuses": {s: counts.get(s, 0) for s in STATUSES}}


def _map(todo, jobs: int) -> Iterator[LedgerRecord]:
    if jobs <= 1 or len(todo) <= 1:
        for item in todo:
            yield _run_instance(item)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_run_instance, todo, chunksize=1)


def summarize(records: Iterable[LedgerRecord]) -> dict:
    counts = Counter(r.status for r in records)
    return {s: counts.get(s, 0) for s in STATUSES}
