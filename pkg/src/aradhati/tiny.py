"""Miniature pretrained backends for desk-scale runs and CI.

Each backend is a Hugging Face checkpoint directory (tokenizer + weights),
so the harness treats it exactly like ``xlm-roberta-base`` or an AraBERT
checkpoint. Supported families: BERT-style and RoBERTa-style encoders,
and a GPT-2 style decoder.
"""

from __future__ import annotations

import json
import logging
import random
from collections import Counter
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, pre_tokenizers, processors
from transformers import (
    AutoModelForCausalLM,
    AutoModelForMaskedLM,
    BertConfig,
    GPT2Config,
    PreTrainedTokenizerFast,
    RobertaConfig,
)

from . import harness  # noqa: F401  (quiets transformers logging)

log = logging.getLogger(__name__)

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
KINDS = ("bert", "roberta", "gpt2")


def train_tokenizer(texts, vocab_size=2000) -> PreTrainedTokenizerFast:
    """WordPiece over whole frequent words plus every seen character.

    The library trainer breaks merge ties in hash order, which differs
    between processes; this vocabulary depends only on the texts.
    """
    pre = pre_tokenizers.Whitespace()
    words = Counter(w for t in texts for w, _ in pre.pre_tokenize_str(t))
    chars = sorted({c for w in words for c in w})
    vocab = list(SPECIALS) + chars + ["##" + c for c in chars]
    seen = set(vocab)
    for w, _ in sorted(words.items(), key=lambda kv: (-kv[1], kv[0])):
        if len(vocab) >= vocab_size:
            break
        if w not in seen:
            vocab.append(w)
            seen.add(w)
    tok = Tokenizer(models.WordPiece({w: i for i, w in enumerate(vocab)}, unk_token="[UNK]"))
    tok.pre_tokenizer = pre
    tok.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", tok.token_to_id("[CLS]")), ("[SEP]", tok.token_to_id("[SEP]"))],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=tok,
        pad_token="[PAD]",
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
        bos_token="[CLS]",
        eos_token="[SEP]",
        padding_side="right",
    )


def _config(kind, tokenizer, hidden, layers, heads, max_positions):
    common = dict(vocab_size=len(tokenizer), pad_token_id=tokenizer.pad_token_id)
    if kind == "bert":
        return BertConfig(hidden_size=hidden, num_hidden_layers=layers, num_attention_heads=heads,
                          intermediate_size=2 * hidden, max_position_embeddings=max_positions, **common)
    if kind == "roberta":
        # RoBERTa offsets positions by padding_idx + 1
        return RobertaConfig(hidden_size=hidden, num_hidden_layers=layers, num_attention_heads=heads,
                             intermediate_size=2 * hidden, max_position_embeddings=max_positions + 2,
                             bos_token_id=tokenizer.cls_token_id, eos_token_id=tokenizer.sep_token_id,
                             type_vocab_size=1, **common)
    if kind == "gpt2":
        return GPT2Config(n_embd=hidden, n_layer=layers, n_head=heads, n_positions=max_positions,
                          bos_token_id=tokenizer.cls_token_id, eos_token_id=tokenizer.sep_token_id, **common)
    raise ValueError(f"unknown tiny backend kind {kind!r}; expected one of {KINDS}")


def make_tiny_backend(
    out_dir,
    texts,
    kind="bert",
    seed=0,
    hidden=64,
    layers=2,
    heads=2,
    vocab_size=2000,
    max_positions=512,
    pretrain_steps=150,
    pretrain_length=64,
    pretrain_lr=1e-3,
):
    """Train a tokenizer and a short language-model warm-start on ``texts``.

    Encoders get masked-LM pretraining, the GPT-2 style model causal-LM
    pretraining. The result is saved with ``save_pretrained`` into
    ``out_dir`` and can be passed anywhere a checkpoint id is accepted.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    texts = [t for t in texts if t]
    if not texts:
        raise ValueError("tiny backend needs a non-empty text corpus")
    torch.manual_seed(seed)
    rng = random.Random(seed)
    tokenizer = train_tokenizer(texts, vocab_size)
    config = _config(kind, tokenizer, hidden, layers, heads, max_positions)
    if kind == "gpt2":
        model = AutoModelForCausalLM.from_config(config)
    else:
        model = AutoModelForMaskedLM.from_config(config)

    losses = []
    if pretrain_steps:
        opt = torch.optim.AdamW(model.parameters(), lr=pretrain_lr, weight_decay=0.01)
        model.train()
        for step in range(pretrain_steps):
            batch = [rng.choice(texts) for _ in range(16)]
            enc = tokenizer(batch, truncation=True, padding="max_length", max_length=pretrain_length,
                            return_tensors="pt")
            labels = enc["input_ids"].clone()
            labels[enc["attention_mask"] == 0] = -100
            if kind == "gpt2":
                out_ = model(input_ids=enc["input_ids"], attention_mask=enc["attention_mask"], labels=labels)
            else:
                special = (enc["input_ids"] == tokenizer.cls_token_id) | (enc["input_ids"] == tokenizer.sep_token_id)
                chosen = (torch.rand(labels.shape) < 0.15) & (enc["attention_mask"] == 1) & ~special
                labels[~chosen] = -100
                inputs = enc["input_ids"].clone()
                inputs[chosen] = tokenizer.mask_token_id
                out_ = model(input_ids=inputs, attention_mask=enc["attention_mask"], labels=labels)
            opt.zero_grad()
            out_.loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
            opt.step()
            losses.append(out_.loss.item())
        log.info("tiny %s backend: pretrain loss %.3f -> %.3f", kind, losses[0], losses[-1])

    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    meta = {
        "kind": kind, "seed": seed, "hidden": hidden, "layers": layers, "heads": heads,
        "vocab_size": len(tokenizer), "pretrain_steps": pretrain_steps,
        "pretrain_loss_first": losses[0] if losses else None,
        "pretrain_loss_last": losses[-1] if losses else None,
    }
    (out / "tiny_backend.json").write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")
    return out
