"""Trainable sequence-to-sequence backend (PyTorch).

A small transformer encoder-decoder over whitespace tokens with a copy
(pointer-generator) head, so values present in the article can be emitted
even when they never appeared in training. Importing this module requires
torch; callers go through :mod:`structsum.summarizer` which turns a missing
runtime into a :class:`CapabilityError`.
"""

from __future__ import annotations

import copy
import json
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import torch
from torch import nn
from torch.nn import functional as F

from structsum.summarizer.base import EpochLog, SummarizerConfig, run_training, truncate_input
from structsum.types import TrainingExample

logger = logging.getLogger(__name__)

PAD, BOS, EOS, UNK = 0, 1, 2, 3
SPECIALS = ["<pad>", "<bos>", "<eos>", "<unk>"]


class Vocab:
    def __init__(self, tokens: Sequence[str] = ()):
        self.itos = list(SPECIALS)
        self.stoi = {t: i for i, t in enumerate(self.itos)}
        for t in tokens:
            self.add(t)

    def add(self, token: str) -> int:
        if token not in self.stoi:
            self.stoi[token] = len(self.itos)
            self.itos.append(token)
        return self.stoi[token]

    def __len__(self):
        return len(self.itos)

    def id(self, token: str) -> int:
        return self.stoi.get(token, UNK)


@dataclass
class Encoded:
    src: list[int]  # base-vocab ids, OOV -> UNK
    src_ext: list[int]  # extended ids, OOV -> len(vocab) + k
    oov: list[str]
    tgt_in: list[int] = field(default_factory=list)
    tgt_out: list[int] = field(default_factory=list)  # extended ids


def encode_source(tokens: Sequence[str], vocab: Vocab) -> Encoded:
    oov: list[str] = []
    src, src_ext = [], []
    for t in tokens:
        i = vocab.id(t)
        src.append(i)
        if i == UNK:
            if t not in oov:
                oov.append(t)
            src_ext.append(len(vocab) + oov.index(t))
        else:
            src_ext.append(i)
    return Encoded(src, src_ext, oov)


def encode_example(text: str, target: str, vocab: Vocab, max_input_tokens: int, max_output_tokens: int) -> Encoded:
    enc = encode_source(truncate_input(text, max_input_tokens).split(), vocab)
    tgt = target.split()[: max_output_tokens - 1]
    ids = [vocab.id(t) for t in tgt]
    ext = [len(vocab) + enc.oov.index(t) if i == UNK and t in enc.oov else i for t, i in zip(tgt, ids)]
    enc.tgt_in = [BOS] + ids
    enc.tgt_out = ext + [EOS]
    return enc


class PositionalEncoding(nn.Module):
    def __init__(self, d_model: int, max_len: int):
        super().__init__()
        pos = torch.arange(max_len).unsqueeze(1)
        div = torch.exp(torch.arange(0, d_model, 2) * (-math.log(10000.0) / d_model))
        pe = torch.zeros(max_len, d_model)
        pe[:, 0::2] = torch.sin(pos * div)
        pe[:, 1::2] = torch.cos(pos * div)
        self.register_buffer("pe", pe, persistent=False)

    def forward(self, x):
        return x + self.pe[: x.size(1)]


class PointerSeq2Seq(nn.Module):
    def __init__(self, vocab_size: int, d_model: int, n_heads: int, n_layers: int, dropout: float, max_len: int):
        super().__init__()
        self.vocab_size = vocab_size
        self.d_model = d_model
        self.embed = nn.Embedding(vocab_size, d_model, padding_idx=PAD)
        nn.init.normal_(self.embed.weight, std=d_model**-0.5)
        self.pos = PositionalEncoding(d_model, max_len)
        enc_layer = nn.TransformerEncoderLayer(d_model, n_heads, 4 * d_model, dropout, batch_first=True)
        dec_layer = nn.TransformerDecoderLayer(d_model, n_heads, 4 * d_model, dropout, batch_first=True)
        self.encoder = nn.TransformerEncoder(enc_layer, n_layers, enable_nested_tensor=False)
        self.decoder = nn.TransformerDecoder(dec_layer, n_layers)
        self.copy_query = nn.Linear(d_model, d_model)
        self.gate = nn.Linear(2 * d_model, 1)

    def _emb(self, ids):
        return self.pos(self.embed(ids) * math.sqrt(self.d_model))

    def encode(self, src):
        src_pad = src == PAD
        memory = self.encoder(self._emb(src), src_key_padding_mask=src_pad)
        return memory, src_pad

    def decode(self, tgt_in, memory, src_pad, src_ext, n_ext: int):
        """Log-probabilities over the extended vocabulary, shape (B, T, V + n_ext)."""
        t = tgt_in.size(1)
        causal = torch.ones(t, t, dtype=torch.bool, device=tgt_in.device).triu(1)
        h = self.decoder(
            self._emb(tgt_in),
            memory,
            tgt_mask=causal,
            tgt_key_padding_mask=tgt_in == PAD,
            memory_key_padding_mask=src_pad,
        )
        # output projection tied to the input embedding
        gen = F.softmax(h @ self.embed.weight.T, dim=-1)
        scores = (self.copy_query(h) @ memory.transpose(1, 2)) / math.sqrt(self.d_model)
        scores = scores.masked_fill(src_pad.unsqueeze(1), float("-inf"))
        attn = F.softmax(scores, dim=-1)
        context = attn @ memory
        p_gen = torch.sigmoid(self.gate(torch.cat([h, context], dim=-1)))
        dist = torch.zeros(h.size(0), t, self.vocab_size + n_ext, device=h.device)
        dist[..., : self.vocab_size] = p_gen * gen
        index = src_ext.unsqueeze(1).expand(-1, t, -1)
        dist = dist.scatter_add(2, index, (1 - p_gen) * attn)
        return torch.log(dist + 1e-12)


def _pad(seqs: Sequence[Sequence[int]]) -> torch.Tensor:
    width = max(len(s) for s in seqs)
    return torch.tensor([list(s) + [PAD] * (width - len(s)) for s in seqs], dtype=torch.long)


def _batch_loss(model: PointerSeq2Seq, batch: Sequence[Encoded]) -> torch.Tensor:
    src = _pad([e.src for e in batch])
    src_ext = _pad([e.src_ext for e in batch])
    tgt_in = _pad([e.tgt_in for e in batch])
    tgt_out = _pad([e.tgt_out for e in batch])
    n_ext = max(len(e.oov) for e in batch)
    memory, src_pad = model.encode(src)
    logp = model.decode(tgt_in, memory, src_pad, src_ext, n_ext)
    return F.nll_loss(logp.reshape(-1, logp.size(-1)), tgt_out.reshape(-1), ignore_index=PAD)


class NeuralSummarizer:
    """Vocabulary + model + decoding settings; the opaque backend handle."""

    def __init__(self, config: SummarizerConfig, vocab: Vocab, model: PointerSeq2Seq):
        self.config = config
        self.vocab = vocab
        self.model = model

    @classmethod
    def build(cls, config: SummarizerConfig, examples: Sequence[TrainingExample]) -> NeuralSummarizer:
        vocab = Vocab()
        for ex in examples:
            for t in truncate_input(ex.input_text, config.max_input_tokens).split():
                vocab.add(t)
            for t in ex.target_summary.split():
                vocab.add(t)
        max_len = max(config.max_input_tokens, config.max_output_tokens) + 2
        model = PointerSeq2Seq(len(vocab), config.d_model, config.n_heads, config.n_layers, config.dropout, max_len)
        return cls(config, vocab, model)

    def encode(self, ex: TrainingExample) -> Encoded:
        return encode_example(
            ex.input_text, ex.target_summary, self.vocab, self.config.max_input_tokens, self.config.max_output_tokens
        )

    def mean_loss(self, encoded: Sequence[Encoded]) -> float:
        self.model.eval()
        total, n = 0.0, 0
        with torch.no_grad():
            for i in range(0, len(encoded), self.config.batch_size):
                batch = encoded[i : i + self.config.batch_size]
                total += _batch_loss(self.model, batch).item() * len(batch)
                n += len(batch)
        return total / max(n, 1)

    @torch.no_grad()
    def generate(self, text: str) -> str:
        """Beam search with length-normalized log-probability."""
        self.model.eval()
        enc = encode_source(truncate_input(text, self.config.max_input_tokens).split(), self.vocab)
        if not enc.src:
            return ""
        src = torch.tensor([enc.src])
        src_ext = torch.tensor([enc.src_ext])
        memory, src_pad = self.model.encode(src)
        n_ext = len(enc.oov)
        base = len(self.vocab)
        beams: list[tuple[float, list[int]]] = [(0.0, [])]
        finished: list[tuple[float, list[int]]] = []
        k = self.config.beam_size
        for _ in range(self.config.max_output_tokens):
            inputs = [[BOS] + [t if t < base else UNK for t in seq] for _, seq in beams]
            tgt = torch.tensor(inputs)
            b = len(beams)
            logp = self.model.decode(
                tgt, memory.expand(b, -1, -1), src_pad.expand(b, -1), src_ext.expand(b, -1), n_ext
            )[:, -1, :]
            logp[:, PAD] = float("-inf")
            logp[:, BOS] = float("-inf")
            candidates = []
            for (score, seq), row in zip(beams, logp):
                top = torch.topk(row, min(k, row.numel()))
                for lp, idx in zip(top.values.tolist(), top.indices.tolist()):
                    candidates.append((score + lp, seq + [idx]))
            candidates.sort(key=lambda c: c[0], reverse=True)
            beams = []
            for score, seq in candidates:
                if seq[-1] == EOS:
                    finished.append((score / len(seq), seq[:-1]))
                else:
                    beams.append((score, seq))
                if len(beams) == k:
                    break
            if not beams or len(finished) >= k:
                break
        if not finished:
            finished = [(score / max(len(seq), 1), seq) for score, seq in beams]
        _, best = max(finished, key=lambda c: c[0])
        words = [self.vocab.itos[i] if i < base else enc.oov[i - base] for i in best]
        return " ".join(w for w in words if w not in SPECIALS)

    def save(self, directory, training_log: Sequence[EpochLog]) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        torch.save(self.model.state_dict(), d / "model.pt")
        (d / "vocab.json").write_text(json.dumps(self.vocab.itos, ensure_ascii=False) + "\n", encoding="utf-8")
        (d / "config.json").write_text(json.dumps(self.config.to_dict(), indent=2) + "\n")
        (d / "training_log.json").write_text(json.dumps([e.to_dict() for e in training_log], indent=2) + "\n")

    @classmethod
    def load(cls, directory) -> tuple[NeuralSummarizer, list[EpochLog]]:
        d = Path(directory)
        config = SummarizerConfig.from_dict(json.loads((d / "config.json").read_text()))
        vocab = Vocab(json.loads((d / "vocab.json").read_text(encoding="utf-8"))[len(SPECIALS) :])
        max_len = max(config.max_input_tokens, config.max_output_tokens) + 2
        model = PointerSeq2Seq(len(vocab), config.d_model, config.n_heads, config.n_layers, config.dropout, max_len)
        model.load_state_dict(torch.load(d / "model.pt", weights_only=True))
        log = [EpochLog(**e) for e in json.loads((d / "training_log.json").read_text())]
        return cls(config, vocab, model), log


def fit_neural(
    train: Sequence[TrainingExample], validation: Sequence[TrainingExample], config: SummarizerConfig
) -> tuple[NeuralSummarizer, list[EpochLog]]:
    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    handle = NeuralSummarizer.build(config, train)
    train_enc = [handle.encode(ex) for ex in train]
    # with no validation data, monitor the training loss instead
    val_enc = [handle.encode(ex) for ex in validation] if validation else train_enc
    optimizer = torch.optim.AdamW(handle.model.parameters(), lr=config.learning_rate, weight_decay=0.0)

    def train_epoch(epoch: int) -> float:
        handle.model.train()
        order = list(range(len(train_enc)))
        rng.shuffle(order)
        total = 0.0
        for i in range(0, len(order), config.batch_size):
            batch = [train_enc[j] for j in order[i : i + config.batch_size]]
            loss = _batch_loss(handle.model, batch)
            optimizer.zero_grad()
            loss.backward()
            nn.utils.clip_grad_norm_(handle.model.parameters(), 1.0)
            optimizer.step()
            total += loss.item() * len(batch)
        loss = total / len(train_enc)
        logger.info("epoch %d train_loss %.4f", epoch, loss)
        return loss

    log = run_training(
        train_epoch,
        lambda: handle.mean_loss(val_enc),
        lambda: copy.deepcopy(handle.model.state_dict()),
        handle.model.load_state_dict,
        config.max_epochs,
        config.early_stopping,
    )
    if config.checkpoint_dir:
        handle.save(config.checkpoint_dir, log)
    return handle, log
