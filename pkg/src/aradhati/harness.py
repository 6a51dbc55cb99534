"""Fine-tuning and inference over pretrained sequence classifiers.

Any Hugging Face checkpoint with a sequence-classification head works as a
backend (``xlm-roberta-base``, ``aubmindlab/bert-base-arabertv02``, a
GPT-2 style model, or a directory from :func:`aradhati.tiny.make_tiny_backend`).
Decoder-only models classify from the hidden state of the last
non-padding token.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import torch
import transformers

from .records import InstanceRecord

# checkpoint load reports and shard progress bars drown the run log
transformers.logging.set_verbosity_error()
transformers.logging.disable_progress_bar()

log = logging.getLogger(__name__)

# default search grid
DEFAULT_LEARNING_RATES = (5e-6, 15e-6, 20e-6, 5e-5)
DEFAULT_EPOCHS = (1, 2, 3, 5, 7)


class TrainingError(RuntimeError):
    pass


class DivergenceError(TrainingError):
    pass


class TokenizerMissingError(RuntimeError):
    pass


@dataclass(frozen=True)
class FineTuneConfig:
    base_model: str
    learning_rate: float = 5e-5
    epochs: int = 3
    batch_size: int = 16
    max_length: int = 256
    seed: int = 0
    weight_decay: float = 0.01
    warmup_steps: int = 0
    max_grad_norm: float = 1.0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_length < 1:
            raise ValueError(f"max_length must be >= 1, got {self.max_length}")


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    label: int
    score: float
    model: str

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")
        if self.label != int(self.score >= 0.5):
            raise ValueError(f"label {self.label} inconsistent with score {self.score}")


@dataclass
class Encoding:
    input_ids: list[int]
    attention_mask: list[int]
    truncated: bool


@dataclass
class ModelHandle:
    """A fine-tuned classifier plus the provenance that produced it."""

    name: str
    provenance: dict
    model: object = field(repr=False)
    tokenizer: object = field(repr=False)
    path: Path | None = None

    @property
    def config(self) -> FineTuneConfig:
        return FineTuneConfig(**self.provenance["config"])

    def save(self, path) -> Path:
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        self.model.save_pretrained(path)
        self.tokenizer.save_pretrained(path)
        write_json(path / "provenance.json", self.provenance)
        self.path = path
        return path

    @classmethod
    def load(cls, path, name=None) -> ModelHandle:
        from transformers import AutoModelForSequenceClassification

        path = Path(path)
        provenance = json.loads((path / "provenance.json").read_text(encoding="utf-8"))
        tokenizer = load_tokenizer(path)
        model = AutoModelForSequenceClassification.from_pretrained(path)
        model.eval()
        return cls(name or provenance.get("name", path.name), provenance, model, tokenizer, path)


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def load_tokenizer(base_model):
    from transformers import AutoTokenizer

    try:
        tok = AutoTokenizer.from_pretrained(str(base_model))
    except (OSError, ValueError) as exc:
        raise TokenizerMissingError(f"no tokenizer for {base_model}: {exc}") from exc
    if tok.pad_token is None:
        # GPT-style vocabularies ship without a pad token
        tok.pad_token = tok.eos_token
    tok.padding_side = "right"
    return tok


def load_classifier(base_model, tokenizer):
    from transformers import AutoModelForSequenceClassification

    model = AutoModelForSequenceClassification.from_pretrained(str(base_model), num_labels=2)
    if model.config.pad_token_id is None:
        model.config.pad_token_id = tokenizer.pad_token_id
    return model


def encode(tokenizer, text: str, max_length: int = 256) -> Encoding:
    """Token ids padded or truncated to exactly ``max_length``."""
    if tokenizer is None:
        raise TokenizerMissingError("no tokenizer loaded")
    full = tokenizer(text)["input_ids"]
    enc = tokenizer(text, truncation=True, padding="max_length", max_length=max_length)
    # below the special-token count the tokenizer overshoots; cut hard
    ids, mask = list(enc["input_ids"])[:max_length], list(enc["attention_mask"])[:max_length]
    return Encoding(ids, mask, len(full) > max_length)


def _batch(tokenizer, texts, max_length):
    enc = tokenizer(list(texts), truncation=True, padding="max_length", max_length=max_length, return_tensors="pt")
    return {k: v[:, :max_length] for k, v in enc.items()}


def _as_pairs(train_set) -> list[tuple[str, int]]:
    pairs = []
    for item in train_set:
        if isinstance(item, InstanceRecord):
            pairs.append((item.text, item.label))
        else:
            text, label = item
            pairs.append((text, int(label)))
    return pairs


def data_hash(pairs: Iterable[tuple[str, int]]) -> str:
    h = hashlib.sha256()
    for text, label in pairs:
        h.update(f"{label}\t{text}\n".encode("utf-8"))
    return h.hexdigest()


def _seed_everything(seed):
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)


def finetune(
    base_model,
    train_set,
    config: FineTuneConfig,
    name: str | None = None,
    on_epoch: Callable[[int, ModelHandle], None] | None = None,
) -> ModelHandle:
    """Fine-tune ``base_model`` for binary subjectivity with AdamW and cross-entropy.

    ``on_epoch(epoch, handle)`` is called after every epoch with the model in
    eval mode; anything it does must not consume the global RNG.
    """
    pairs = _as_pairs(train_set)
    if not pairs:
        raise TrainingError("empty training set")
    labels = {y for _, y in pairs}
    if labels != {0, 1}:
        raise TrainingError(f"training set must contain both classes, got {sorted(labels)}")

    _seed_everything(config.seed)
    tokenizer = load_tokenizer(base_model)
    model = load_classifier(base_model, tokenizer)
    no_decay = ("bias", "LayerNorm.weight", "layer_norm.weight", "ln_")
    groups = [
        {"params": [p for n, p in model.named_parameters() if not any(k in n for k in no_decay)],
         "weight_decay": config.weight_decay},
        {"params": [p for n, p in model.named_parameters() if any(k in n for k in no_decay)],
         "weight_decay": 0.0},
    ]
    optimizer = torch.optim.AdamW(groups, lr=config.learning_rate)
    scheduler = None
    if config.warmup_steps:
        scheduler = torch.optim.lr_scheduler.LambdaLR(
            optimizer, lambda step: min(1.0, (step + 1) / config.warmup_steps))
    shuffle_gen = torch.Generator().manual_seed(config.seed)
    loss_fn = torch.nn.CrossEntropyLoss()

    handle = ModelHandle(
        name=name or Path(str(base_model)).name,
        provenance={
            "name": name or Path(str(base_model)).name,
            "base_model": str(base_model),
            "config": asdict(config),
            "data_hash": data_hash(pairs),
            "n_train": len(pairs),
            "loss": "cross_entropy",
            "epoch_loss": [],
        },
        model=model,
        tokenizer=tokenizer,
    )
    for epoch in range(1, config.epochs + 1):
        model.train()
        order = torch.randperm(len(pairs), generator=shuffle_gen).tolist()
        total, batches = 0.0, 0
        for start in range(0, len(order), config.batch_size):
            chunk = [pairs[i] for i in order[start:start + config.batch_size]]
            enc = _batch(tokenizer, (t for t, _ in chunk), config.max_length)
            logits = model(input_ids=enc["input_ids"], attention_mask=enc["attention_mask"]).logits
            loss = loss_fn(logits, torch.tensor([y for _, y in chunk]))
            if not torch.isfinite(loss):
                raise DivergenceError(f"non-finite loss at epoch {epoch}, config={asdict(config)}")
            optimizer.zero_grad()
            loss.backward()
            if config.max_grad_norm:
                torch.nn.utils.clip_grad_norm_(model.parameters(), config.max_grad_norm)
            optimizer.step()
            if scheduler is not None:
                scheduler.step()
            total += loss.item()
            batches += 1
        mean_loss = total / batches
        if not math.isfinite(mean_loss):
            raise DivergenceError(f"non-finite loss at epoch {epoch}, config={asdict(config)}")
        handle.provenance["epoch_loss"].append(mean_loss)
        log.info("%s epoch %d/%d loss %.4f", handle.name, epoch, config.epochs, mean_loss)
        model.eval()
        if on_epoch is not None:
            on_epoch(epoch, handle)
    return handle


@torch.no_grad()
def predict(model: ModelHandle, texts: Sequence[str], ids: Sequence[str] | None = None,
            batch_size: int = 64) -> list[PredictionRecord]:
    """Score ``texts``; one record per input, in input order."""
    texts = list(texts)
    if ids is None:
        ids = [str(i) for i in range(len(texts))]
    elif len(ids) != len(texts):
        raise ValueError("ids and texts differ in length")
    if not texts:
        return []
    max_length = model.provenance["config"]["max_length"]
    model.model.eval()
    out = []
    for start in range(0, len(texts), batch_size):
        enc = _batch(model.tokenizer, texts[start:start + batch_size], max_length)
        logits = model.model(input_ids=enc["input_ids"], attention_mask=enc["attention_mask"]).logits
        probs = torch.softmax(logits.double(), dim=-1)[:, 1].tolist()
        for j, p in enumerate(probs):
            p = min(max(p, 0.0), 1.0)
            out.append(PredictionRecord(ids[start + j], int(p >= 0.5), p, model.name))
    return out


def accuracy(model: ModelHandle, pairs) -> float:
    pairs = _as_pairs(pairs)
    preds = predict(model, [t for t, _ in pairs])
    return sum(p.label == y for p, (_, y) in zip(preds, pairs)) / len(pairs)


@dataclass
class GridRow:
    learning_rate: float
    epochs: int
    accuracy: float | None
    error: str | None = None
    artifact: str | None = None


@dataclass
class GridResult:
    best: FineTuneConfig | None
    rows: list[GridRow]

    @property
    def failures(self):
        return [r for r in self.rows if r.error is not None]

    def table(self):
        return [asdict(r) for r in self.rows]


def grid_search(
    base_model,
    train,
    validation,
    learning_rates: Sequence[float] = DEFAULT_LEARNING_RATES,
    epochs: Sequence[int] = DEFAULT_EPOCHS,
    base_config: FineTuneConfig | None = None,
    name: str | None = None,
    save_dir=None,
) -> GridResult:
    """Evaluate every (learning rate, epochs) point on ``validation``.

    Points sharing a learning rate come from one run, snapshotted after each
    listed epoch: without a decaying schedule, the model after k epochs of a
    longer run is the model a k-epoch run would produce. The best point
    maximizes validation accuracy; ties go to the lower learning rate, then
    fewer epochs.
    """
    learning_rates = sorted(set(learning_rates))
    epoch_set = sorted(set(epochs))
    if not learning_rates or not epoch_set:
        raise ValueError("grid must be non-empty")
    base_config = base_config or FineTuneConfig(str(base_model))
    validation = _as_pairs(validation)
    rows: list[GridRow] = []

    for lr in learning_rates:
        cfg = replace(base_config, base_model=str(base_model), learning_rate=lr, epochs=epoch_set[-1])
        done = set()

        def snapshot(epoch, handle, lr=lr, done=done):
            if epoch not in epoch_set:
                return
            acc = accuracy(handle, validation)
            artifact = None
            if save_dir is not None:
                handle.provenance["config"]["epochs"] = epoch
                handle.provenance["validation_accuracy"] = acc
                artifact = str(handle.save(Path(save_dir) / f"lr{lr:g}_ep{epoch}"))
                handle.provenance["config"]["epochs"] = cfg.epochs
            rows.append(GridRow(lr, epoch, acc, artifact=artifact))
            done.add(epoch)

        try:
            finetune(base_model, train, cfg, name=name, on_epoch=snapshot)
        except TrainingError as exc:
            log.warning("grid point lr=%g failed: %s", lr, exc)
            for ep in epoch_set:
                if ep not in done:
                    rows.append(GridRow(lr, ep, None, error=str(exc)))

    ok = [r for r in rows if r.error is None]
    best = None
    if ok:
        top = max(ok, key=lambda r: (r.accuracy, -r.learning_rate, -r.epochs))
        best = replace(base_config, base_model=str(base_model), learning_rate=top.learning_rate, epochs=top.epochs)
    rows.sort(key=lambda r: (r.learning_rate, r.epochs))
    return GridResult(best, rows)
