"""Model provider contracts and implementations.

Two capabilities are abstracted: sentence embedding and text generation.
Each has a deterministic offline implementation (feature-hash embedder,
scripted generator) and a remote HTTP client. The offline pair is what the
test suite and the bundled evaluation run on; nothing in the core pipeline
knows which implementation it is talking to.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Collection, Iterable, Sequence

import httpx

from .errors import FileUnreadable, ProviderUnavailable
from .preprocess import RawQuestion, StopwordList, clean

DEFAULT_DIM = 256

TEMPLATE_IDS = ("intent_fallback", "answer_render", "clarify_cause", "elicit_intent")

_SLOT_RE = re.compile(r"\{\{(\w+)\}\}")


@dataclass(frozen=True)
class EmbeddingVector:
    """A unit-norm embedding. Construct via :meth:`from_raw` unless the
    values are already normalized."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("embedding vector is empty")
        norm_sq = 0.0
        for v in self.values:
            if not math.isfinite(v):
                raise ValueError("embedding vector has non-finite components")
            norm_sq += v * v
        if abs(math.sqrt(norm_sq) - 1.0) > 1e-9:
            raise ValueError("embedding vector is not unit-norm")

    @property
    def dim(self) -> int:
        return len(self.values)

    @classmethod
    def from_raw(cls, values: Sequence[float]) -> "EmbeddingVector":
        """L2-normalize arbitrary finite values into a unit vector.

        Values already normalized pass through bit-identically, so a
        save/load round-trip does not perturb stored vectors."""
        norm = math.sqrt(sum(v * v for v in values))
        if norm == 0.0 or not math.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite vector")
        if abs(norm - 1.0) <= 1e-9:
            return cls(tuple(values))
        return cls(tuple(v / norm for v in values))


@dataclass(frozen=True)
class PromptRequest:
    template_id: str
    variables: dict[str, str] = field(default_factory=dict)

    def fingerprint(self) -> str:
        """Stable digest of the variables map, used by the scripted mock."""
        canon = json.dumps(self.variables, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class LlmReply:
    text: str
    provider_id: str


class EmbeddingProvider:
    """Contract: ``embed`` is deterministic per provider and returns a unit
    vector of the provider's dimensionality, or raises ProviderUnavailable."""

    provider_id = "embedding"
    dim: int
    calls: int = 0

    def embed(self, text: str) -> EmbeddingVector:
        raise NotImplementedError


class LlmProvider:
    """Contract: ``complete`` returns generated text for a prompt request,
    or raises ProviderUnavailable.

    ``calls_by_template`` splits the call counter per template id so tests
    can tell cascade calls (intent_fallback) from rendering calls.
    """

    provider_id = "llm"
    calls: int = 0

    def __init__(self):
        self.calls = 0
        self.calls_by_template: dict[str, int] = {}

    def _count(self, request: PromptRequest) -> None:
        self.calls += 1
        self.calls_by_template[request.template_id] = (
            self.calls_by_template.get(request.template_id, 0) + 1
        )

    def complete(self, request: PromptRequest) -> LlmReply:
        raise NotImplementedError


def _stable_hash(token: str, salt: bytes) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, person=salt).digest()
    return int.from_bytes(digest, "big")


class MockEmbedder(EmbeddingProvider):
    """Signed feature-hash bag-of-tokens embedder.

    Tokenization reuses the cleaning rules, so embedding a raw question and
    embedding its cleaned text yield the same vector. Each token lands on
    index ``h1 mod dim`` with sign from ``h2``; the accumulated vector is
    L2-normalized. Pure function of the text: stable hashes, no randomness.
    """

    provider_id = "mock-embed"

    def __init__(
        self,
        dim: int = DEFAULT_DIM,
        stoplist: StopwordList = frozenset(),
        lexicon: Collection[str] | None = None,
        lang: str = "en",
    ):
        self.dim = dim
        self._stoplist = stoplist
        self._lexicon = lexicon
        self._lang = lang
        self.calls = 0

    def _tokens(self, text: str) -> tuple[str, ...]:
        return clean(RawQuestion(text, self._lang), self._stoplist, self._lexicon).tokens

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        self.calls += 1
        tokens = self._tokens(text)
        acc = [0.0] * self.dim
        for tok in tokens:
            idx = _stable_hash(tok, b"idx") % self.dim
            sign = 1.0 if _stable_hash(tok, b"sign") % 2 == 0 else -1.0
            acc[idx] += sign
        if not any(acc):
            # Opposite-signed tokens cancelled out completely; there is no
            # direction to normalize.
            raise ValueError("token hashes cancelled to the zero vector")
        return EmbeddingVector.from_raw(acc)


class RemoteEmbedder(EmbeddingProvider):
    """HTTP encoder client: POST {"text": ...} -> {"vector": [...]}.

    The provider declares its dimensionality implicitly with the first
    successful response; later responses must match it.
    """

    provider_id = "remote-embed"

    def __init__(self, url: str, timeout: float = 5.0):
        self.url = url
        self.timeout = timeout
        self.dim = 0  # pinned on first successful call
        self.calls = 0
        self._client = httpx.Client(timeout=timeout)

    def embed(self, text: str) -> EmbeddingVector:
        self.calls += 1
        try:
            resp = self._client.post(self.url, json={"text": text})
            resp.raise_for_status()
            vector = resp.json()["vector"]
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise ProviderUnavailable(f"remote encoder at {self.url}: {exc}") from exc
        try:
            result = EmbeddingVector.from_raw([float(v) for v in vector])
        except (TypeError, ValueError) as exc:
            raise ProviderUnavailable(f"remote encoder returned a bad vector: {exc}") from exc
        if self.dim == 0:
            self.dim = result.dim
        elif result.dim != self.dim:
            raise ProviderUnavailable(
                f"remote encoder changed dimensionality ({self.dim} -> {result.dim})"
            )
        return result

    def probe(self, budget: float) -> bool:
        try:
            resp = self._client.post(
                self.url, json={"text": "ping"}, timeout=min(self.timeout, budget)
            )
            return resp.status_code == 200
        except httpx.HTTPError:
            return False


class PromptLibrary:
    """Prompt templates read from UTF-8 text files with ``{{slot}}``
    placeholders, one file per template id."""

    def __init__(self, templates: dict[str, str]):
        self._templates = dict(templates)

    @classmethod
    def from_dir(cls, directory: str | Path) -> "PromptLibrary":
        d = Path(directory)
        templates = {}
        for template_id in TEMPLATE_IDS:
            path = d / f"{template_id}.txt"
            try:
                templates[template_id] = path.read_text("utf-8")
            except OSError as exc:
                raise FileUnreadable(f"cannot read prompt template {path}: {exc}") from exc
        return cls(templates)

    def slots(self, template_id: str) -> set[str]:
        return set(_SLOT_RE.findall(self._template(template_id)))

    def _template(self, template_id: str) -> str:
        if template_id not in self._templates:
            raise KeyError(f"unknown prompt template {template_id!r}")
        return self._templates[template_id]

    def render(self, request: PromptRequest) -> str:
        """Substitute slots; every slot in the template must have a value."""
        text = self._template(request.template_id)
        missing = self.slots(request.template_id) - set(request.variables)
        if missing:
            raise ValueError(
                f"prompt {request.template_id!r} missing variables: {sorted(missing)}"
            )
        return _SLOT_RE.sub(lambda m: request.variables[m.group(1)], text)


def _substitute(text: str, variables: dict[str, str]) -> str:
    return _SLOT_RE.sub(lambda m: variables.get(m.group(1), m.group(0)), text)


class ScriptedLlm(LlmProvider):
    """Deterministic generator driven by a reply script.

    Lookup order per request: exact (template_id, variables fingerprint)
    entries, then subset-match entries in script order (every pinned
    variable equals the request's), then the template's default reply.
    Defaults may reference request variables with ``{{slot}}``. A request
    nothing matches raises ProviderUnavailable.
    """

    provider_id = "scripted-llm"

    def __init__(self):
        super().__init__()
        self._exact: dict[tuple[str, str], str] = {}
        self._matchers: list[tuple[str, dict[str, str], str]] = []
        self._defaults: dict[str, str] = {}

    def register(self, template_id: str, variables: dict[str, str], reply: str) -> None:
        req = PromptRequest(template_id, dict(variables))
        self._exact[(template_id, req.fingerprint())] = reply

    def register_match(self, template_id: str, match: dict[str, str], reply: str) -> None:
        self._matchers.append((template_id, dict(match), reply))

    def register_default(self, template_id: str, reply: str) -> None:
        self._defaults[template_id] = reply

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ScriptedLlm":
        p = Path(path)
        try:
            lines = p.read_text("utf-8").splitlines()
        except OSError as exc:
            raise FileUnreadable(f"cannot read LLM script {p}: {exc}") from exc
        llm = cls()
        for lineno, line in enumerate(lines, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                entry = json.loads(line)
                template_id = entry["template_id"]
                if "default" in entry:
                    llm.register_default(template_id, entry["default"])
                elif "match" in entry:
                    llm.register_match(template_id, entry["match"], entry["reply"])
                else:
                    llm.register(template_id, entry["variables"], entry["reply"])
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise FileUnreadable(f"bad LLM script entry at {p}:{lineno}: {exc}") from exc
        return llm

    def complete(self, request: PromptRequest) -> LlmReply:
        self._count(request)
        reply = self._exact.get((request.template_id, request.fingerprint()))
        if reply is None:
            for template_id, match, candidate in self._matchers:
                if template_id != request.template_id:
                    continue
                if all(request.variables.get(k) == v for k, v in match.items()):
                    reply = candidate
                    break
        if reply is None:
            default = self._defaults.get(request.template_id)
            if default is None:
                raise ProviderUnavailable(
                    f"no scripted reply for template {request.template_id!r}"
                )
            reply = _substitute(default, request.variables)
        if not reply:
            raise ProviderUnavailable("scripted reply is empty")
        return LlmReply(text=reply, provider_id=self.provider_id)


class RemoteLlm(LlmProvider):
    """HTTP generator client: POST {"prompt": ...} -> {"text": ...}.

    The prompt text is rendered locally from the template library, so the
    remote side only ever sees a flat prompt string.
    """

    provider_id = "remote-llm"

    def __init__(self, url: str, prompts: PromptLibrary, timeout: float = 5.0):
        super().__init__()
        self.url = url
        self.prompts = prompts
        self.timeout = timeout
        self._client = httpx.Client(timeout=timeout)

    def complete(self, request: PromptRequest) -> LlmReply:
        self._count(request)
        prompt = self.prompts.render(request)
        try:
            resp = self._client.post(self.url, json={"prompt": prompt})
            resp.raise_for_status()
            text = resp.json()["text"]
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise ProviderUnavailable(f"remote LLM at {self.url}: {exc}") from exc
        if not isinstance(text, str) or not text:
            raise ProviderUnavailable("remote LLM returned an empty reply")
        return LlmReply(text=text, provider_id=self.provider_id)

    def probe(self, budget: float) -> bool:
        try:
            resp = self._client.post(
                self.url, json={"prompt": "ping"}, timeout=min(self.timeout, budget)
            )
            return resp.status_code == 200
        except httpx.HTTPError:
            return False


def slugify(label: str) -> str:
    """Lowercase and join on underscores: the canonical form for intent
    labels coming from free text (LLM replies, user corrections)."""
    return "_".join(label.strip().lower().split())


_INTENT_LINE_RE = re.compile(r"^\s*intent\s*:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE)


def parse_intent_reply(
    reply_text: str, known_labels: Iterable[str]
) -> tuple[str, bool] | None:
    """Extract the intent label from a generator reply.

    The reply must contain a line ``intent: <label>``. The label is matched
    case-insensitively against the known inventory; an unmatched label is
    returned slugified and flagged as new. Returns None when no usable
    label is present.
    """
    m = _INTENT_LINE_RE.search(reply_text)
    if not m:
        return None
    raw = m.group(1)
    for known in known_labels:
        if known.lower() == raw.lower():
            return known, False
    slug = slugify(raw)
    if not slug:
        return None
    return slug, True
