"""Translation backends behind one interface: HTTP services, replay files, mocks.

The HTTP backend is vendor-agnostic: a request template describes how the
source text is embedded in the request body and where the translation sits in
the response. Credentials come from environment variables only. Deterministic
mock translators cover testing and metric calibration; a replay backend
re-serves previously obtained translations so runs are reproducible offline.
"""

from __future__ import annotations

import enum
import json
import logging
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence

import requests

from .corpus import GenderLabel, SourceSentence, StereotypeLists, Stereotype, assign_stereotype
from .fileio import read_jsonl, write_jsonl

logger = logging.getLogger(__name__)


class BackendError(ValueError):
    """Configuration or usage error that aborts a run before any request."""


class TranslationStatus(enum.Enum):
    OK = "ok"
    FAILED = "failed"


@dataclass(frozen=True)
class TranslationRecord:
    source_id: str
    target_text: str
    backend: str
    status: TranslationStatus
    reason: str | None = None

    @classmethod
    def ok(cls, source_id: str, target_text: str, backend: str) -> "TranslationRecord":
        if not target_text:
            return cls.failed(source_id, backend, "empty translation")
        return cls(source_id, target_text, backend, TranslationStatus.OK)

    @classmethod
    def failed(cls, source_id: str, backend: str, reason: str) -> "TranslationRecord":
        return cls(source_id, "", backend, TranslationStatus.FAILED, reason)


def translation_to_record(t: TranslationRecord) -> dict:
    record: dict = {
        "source_id": t.source_id,
        "target_text": t.target_text,
        "backend": t.backend,
        "status": t.status.value,
    }
    if t.reason is not None:
        record["reason"] = t.reason
    return record


def translation_from_record(record: Mapping, *, where: str = "") -> TranslationRecord:
    ctx = f"{where}: " if where else ""
    try:
        status = TranslationStatus(record.get("status", "ok"))
    except ValueError:
        raise BackendError(f"{ctx}bad status token {record.get('status')!r}") from None
    source_id = record.get("source_id")
    if not source_id:
        raise BackendError(f"{ctx}missing source_id")
    return TranslationRecord(
        source_id=source_id,
        target_text=record.get("target_text", ""),
        backend=record.get("backend", "unknown"),
        status=status,
        reason=record.get("reason"),
    )


def write_translations(path: str | Path, records: Iterable[TranslationRecord]) -> int:
    return write_jsonl(path, (translation_to_record(r) for r in records))


def read_translations(path: str | Path) -> list[TranslationRecord]:
    return [
        translation_from_record(record, where=f"{path}: line {lineno}")
        for lineno, record in read_jsonl(path)
    ]


# --------------------------------------------------------------------------
# Mock translators


MOCK_KINDS = (
    "always_male",
    "always_female",
    "echo_gold",
    "neutralizing",
    "coin_flip",
    "stereotype_follower",
)


@dataclass(frozen=True)
class MockSpec:
    """Deterministic synthetic translator. coin_flip draws a gender per item
    from a stream keyed on (seed, source id), so outputs are reproducible and
    independent of batch order."""

    kind: str
    seed: int = 0
    p_male: float = 0.5
    lists: StereotypeLists | None = None

    def __post_init__(self) -> None:
        if self.kind not in MOCK_KINDS:
            raise BackendError(f"unknown mock kind {self.kind!r}")
        if self.kind == "coin_flip" and not 0.0 <= self.p_male <= 1.0:
            raise BackendError("p_male must be within [0, 1]")
        if self.kind == "stereotype_follower" and self.lists is None:
            raise BackendError("stereotype_follower requires stereotype lists")


def _english_rendering(source: SourceSentence, gender: GenderLabel) -> str:
    """Fixed English surface forms carrying exactly the pronouns of one gender."""
    occupation = source.occupation
    if gender is GenderLabel.MALE:
        if occupation:
            return f"I have known him for a long time, my friend works as a {occupation}."
        return "I have known him for a long time, he is a good friend."
    if gender is GenderLabel.FEMALE:
        if occupation:
            return f"I have known her for a long time, my friend works as a {occupation}."
        return "I have known her for a long time, she is a good friend."
    if occupation:
        return f"I have known my friend for a long time, my friend works as a {occupation}."
    return "I have known my friend for a long time, we meet often."


def mock_translate(source: SourceSentence, spec: MockSpec) -> str:
    if spec.kind == "always_male":
        return _english_rendering(source, GenderLabel.MALE)
    if spec.kind == "always_female":
        return _english_rendering(source, GenderLabel.FEMALE)
    if spec.kind == "neutralizing":
        return _english_rendering(source, GenderLabel.NEUTRAL)
    if spec.kind == "echo_gold":
        if source.gold_gender is None:
            raise BackendError(f"echo_gold needs a gold gender, record {source.id!r} has none")
        return _english_rendering(source, source.gold_gender)
    if spec.kind == "coin_flip":
        draw = random.Random(f"{spec.seed}:{source.id}").random()
        gender = GenderLabel.MALE if draw < spec.p_male else GenderLabel.FEMALE
        return _english_rendering(source, gender)
    if spec.kind == "stereotype_follower":
        if source.occupation is None:
            raise BackendError(
                f"stereotype_follower needs an occupation, record {source.id!r} has none"
            )
        assert spec.lists is not None
        leaning = assign_stereotype(source.occupation, GenderLabel.MALE, spec.lists)
        # Pro for a male gold means the occupation is male-listed; Unlisted
        # falls back to the masculine default.
        gender = GenderLabel.FEMALE if leaning is Stereotype.ANTI else GenderLabel.MALE
        return _english_rendering(source, gender)
    raise BackendError(f"unknown mock kind {spec.kind!r}")


# --------------------------------------------------------------------------
# Backend configuration


class BackendKind(enum.Enum):
    HTTP = "http"
    FILE_REPLAY = "file_replay"
    MOCK = "mock"


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_base_ms: int = 250

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise BackendError("retry max_attempts must be >= 1")
        if self.backoff_base_ms < 0:
            raise BackendError("retry backoff_base_ms must be >= 0")


@dataclass(frozen=True)
class BackendConfig:
    name: str
    kind: BackendKind
    endpoint: str | None = None
    auth_env: str | None = None
    request_template: Mapping[str, Any] | None = None
    replay_path: str | None = None
    mock: MockSpec | None = None
    batch_size: int = 32
    max_concurrency: int = 1
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    rate_limit: float | None = None
    timeout_s: float = 30.0

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise BackendError("batch_size must be positive")
        if self.max_concurrency < 1:
            raise BackendError("max_concurrency must be positive")
        if self.rate_limit is not None and self.rate_limit <= 0:
            raise BackendError("rate_limit must be positive when set")
        if self.kind is BackendKind.HTTP:
            if not self.endpoint:
                raise BackendError(f"backend {self.name!r}: http kind requires an endpoint")
            if self.request_template is None:
                raise BackendError(f"backend {self.name!r}: http kind requires a request_template")
            if "body" not in self.request_template or "response_path" not in self.request_template:
                raise BackendError(
                    f"backend {self.name!r}: request_template needs 'body' and 'response_path'"
                )
        elif self.kind is BackendKind.FILE_REPLAY:
            if not self.replay_path:
                raise BackendError(f"backend {self.name!r}: file_replay kind requires replay_path")
        elif self.kind is BackendKind.MOCK:
            if self.mock is None:
                raise BackendError(f"backend {self.name!r}: mock kind requires a mock spec")


def backend_config_from_dict(raw: Mapping[str, Any], *, base_dir: Path | None = None) -> BackendConfig:
    """Build a BackendConfig from one entry of the backends config file.

    Relative replay/stereotype-list paths resolve against the config file's
    directory when base_dir is given.
    """

    def resolve(p: str | None) -> str | None:
        if p is None or base_dir is None:
            return p
        return str((base_dir / p) if not Path(p).is_absolute() else Path(p))

    name = raw.get("name")
    if not name:
        raise BackendError("backend entry is missing a name")
    try:
        kind = BackendKind(raw.get("kind", ""))
    except ValueError:
        raise BackendError(f"backend {name!r}: unknown kind {raw.get('kind')!r}") from None

    mock = None
    if raw.get("mock") is not None:
        mock_raw = dict(raw["mock"])
        lists = None
        if "male_list" in mock_raw or "female_list" in mock_raw:
            try:
                male_list = resolve(mock_raw.pop("male_list"))
                female_list = resolve(mock_raw.pop("female_list"))
            except KeyError:
                raise BackendError(
                    f"backend {name!r}: stereotype mock needs both male_list and female_list"
                ) from None
            lists = StereotypeLists.from_files(male_list, female_list)
        mock = MockSpec(
            kind=mock_raw.get("spec", ""),
            seed=int(mock_raw.get("seed", 0)),
            p_male=float(mock_raw.get("p_male", 0.5)),
            lists=lists,
        )

    retry_raw = raw.get("retry", {})
    return BackendConfig(
        name=name,
        kind=kind,
        endpoint=raw.get("endpoint"),
        auth_env=raw.get("auth_env"),
        request_template=raw.get("request_template"),
        replay_path=resolve(raw.get("replay_path")),
        mock=mock,
        batch_size=int(raw.get("batch_size", 32)),
        max_concurrency=int(raw.get("max_concurrency", 1)),
        retry=RetryPolicy(
            max_attempts=int(retry_raw.get("max_attempts", 3)),
            backoff_base_ms=int(retry_raw.get("backoff_base_ms", 250)),
        ),
        rate_limit=raw.get("rate_limit"),
        timeout_s=float(raw.get("timeout_s", 30.0)),
    )


def find_backend_entry(path: str | Path, name: str) -> dict[str, Any]:
    """Fetch one backend definition (raw dict) by name from a config file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise BackendError(f"{path}: no such config file") from None
    except json.JSONDecodeError as exc:
        raise BackendError(f"{path}: invalid JSON ({exc.msg})") from exc
    entries = raw.get("backends")
    if not isinstance(entries, list) or not entries:
        raise BackendError(f"{path}: config must contain a non-empty 'backends' list")
    for entry in entries:
        if entry.get("name") == name:
            return entry
    known = ", ".join(sorted(str(e.get("name")) for e in entries))
    raise BackendError(f"{path}: no backend named {name!r} (have: {known})")


def load_backend_config(path: str | Path, name: str) -> BackendConfig:
    """Pick one backend definition by name from a config file."""
    return backend_config_from_dict(find_backend_entry(path, name), base_dir=Path(path).parent)


# --------------------------------------------------------------------------
# Batch translation


class _RateLimiter:
    """Enforces a minimum spacing between request starts, shared across threads."""

    def __init__(
        self,
        rate_per_s: float | None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.interval = 1.0 / rate_per_s if rate_per_s else 0.0
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_slot = 0.0

    def wait(self) -> None:
        if not self.interval:
            return
        with self._lock:
            now = self._clock()
            delay = max(0.0, self._next_slot - now)
            self._next_slot = max(now, self._next_slot) + self.interval
        if delay:
            self._sleep(delay)


def _substitute_text(node: Any, text: str) -> Any:
    if isinstance(node, str):
        return node.replace("{text}", text)
    if isinstance(node, Mapping):
        return {k: _substitute_text(v, text) for k, v in node.items()}
    if isinstance(node, list):
        return [_substitute_text(v, text) for v in node]
    return node


def _extract_path(payload: Any, path: str) -> Any:
    node = payload
    for segment in path.split("."):
        if isinstance(node, Mapping):
            if segment not in node:
                raise KeyError(segment)
            node = node[segment]
        elif isinstance(node, list):
            node = node[int(segment)]
        else:
            raise KeyError(segment)
    return node


class _HttpTranslator:
    def __init__(self, config: BackendConfig) -> None:
        self.config = config
        assert config.request_template is not None
        self.template = config.request_template
        self.credential = None
        if config.auth_env:
            self.credential = os.environ.get(config.auth_env)
            if not self.credential:
                raise BackendError(
                    f"backend {config.name!r}: environment variable {config.auth_env!r} "
                    "is not set"
                )
        self.headers = {}
        for key, value in dict(self.template.get("headers", {})).items():
            value = str(value)
            if "{credential}" in value:
                if self.credential is None:
                    raise BackendError(
                        f"backend {config.name!r}: header {key!r} references a credential "
                        "but auth_env is not configured"
                    )
                value = value.replace("{credential}", self.credential)
            self.headers[key] = value
        self.limiter = _RateLimiter(config.rate_limit)
        self._local = threading.local()

    @property
    def session(self) -> requests.Session:
        # requests.Session is not thread-safe; keep one per worker thread
        if not hasattr(self._local, "session"):
            self._local.session = requests.Session()
        return self._local.session

    def translate(self, source: SourceSentence) -> TranslationRecord:
        cfg = self.config
        reason = "no attempts made"
        for attempt in range(1, cfg.retry.max_attempts + 1):
            if attempt > 1:
                time.sleep(cfg.retry.backoff_base_ms * 2 ** (attempt - 2) / 1000.0)
            self.limiter.wait()
            try:
                response = self.session.post(
                    cfg.endpoint,
                    json=_substitute_text(self.template["body"], source.text),
                    headers=self.headers,
                    timeout=cfg.timeout_s,
                )
            except requests.RequestException as exc:
                reason = f"transport error: {exc.__class__.__name__}"
                continue  # transient
            if 200 <= response.status_code < 300:
                try:
                    target = _extract_path(response.json(), self.template["response_path"])
                except (ValueError, KeyError, IndexError):
                    return TranslationRecord.failed(
                        source.id, cfg.name,
                        f"response did not match path {self.template['response_path']!r}",
                    )
                if not isinstance(target, str):
                    return TranslationRecord.failed(
                        source.id, cfg.name, "extracted translation is not a string"
                    )
                return TranslationRecord.ok(source.id, target, cfg.name)
            if 400 <= response.status_code < 500:
                return TranslationRecord.failed(
                    source.id, cfg.name, f"HTTP {response.status_code}"
                )
            reason = f"HTTP {response.status_code}"  # 5xx: transient
        return TranslationRecord.failed(
            source.id, cfg.name, f"{reason} after {cfg.retry.max_attempts} attempts"
        )


def load_replay_map(path: str | Path) -> dict[str, str]:
    """Read a replay file: either bare {source_id, target_text} lines or a full
    translations file, whose failed lines are ignored."""
    path = Path(path)
    if not path.exists():
        raise BackendError(f"{path}: no such replay file")
    replay: dict[str, str] = {}
    for lineno, record in read_jsonl(path):
        if record.get("status", "ok") != "ok":
            continue
        source_id = record.get("source_id")
        target = record.get("target_text")
        if not source_id or not isinstance(target, str):
            raise BackendError(f"{path}: line {lineno}: needs source_id and target_text")
        replay[source_id] = target
    return replay


def _chunks(items: Sequence, size: int) -> Iterable[Sequence]:
    for start in range(0, len(items), size):
        yield items[start : start + size]


def translate_batch(
    sources: Sequence[SourceSentence],
    config: BackendConfig,
    on_batch: Callable[[list[TranslationRecord]], None] | None = None,
) -> list[TranslationRecord]:
    """Translate sources through the configured backend.

    Returns one record per source in input order; failures become Failed
    records, never dropped. on_batch, when given, receives each completed
    batch so callers can flush partial progress.
    """
    if not sources:
        raise BackendError("no sources to translate")

    per_item: Callable[[SourceSentence], TranslationRecord]
    if config.kind is BackendKind.MOCK:
        assert config.mock is not None
        spec = config.mock

        def per_item(source: SourceSentence) -> TranslationRecord:
            return TranslationRecord.ok(source.id, mock_translate(source, spec), config.name)

    elif config.kind is BackendKind.FILE_REPLAY:
        assert config.replay_path is not None
        replay = load_replay_map(config.replay_path)

        def per_item(source: SourceSentence) -> TranslationRecord:
            target = replay.get(source.id)
            if target is None:
                return TranslationRecord.failed(source.id, config.name, "missing translation")
            return TranslationRecord.ok(source.id, target, config.name)

    else:
        per_item = _HttpTranslator(config).translate

    results: list[TranslationRecord] = []
    pool = None
    if config.kind is BackendKind.HTTP and config.max_concurrency > 1:
        pool = ThreadPoolExecutor(max_workers=config.max_concurrency)
    try:
        for batch in _chunks(sources, config.batch_size):
            if pool is not None:
                batch_records = list(pool.map(per_item, batch))
            else:
                batch_records = [per_item(source) for source in batch]
            results.extend(batch_records)
            if on_batch is not None:
                on_batch(batch_records)
    finally:
        if pool is not None:
            pool.shutdown()
    return results
