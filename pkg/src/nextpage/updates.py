"""Online model maintenance: per-access counters and the periodic sweeps.

Every observed request bumps the page's local counter; the L-th access at a
level promotes the page one level and resets the counter.  Two periodic
sweeps move pages the access stream alone would not: the demotion sweep drops
pages nobody has touched for `demote_threshold` ticks one level, and the
modification sweep raises freshly modified pages one level.  Class numbers
are assigned at build time and never change here.

All times are logical ticks (event indices), never wall clock, so any replay
of the same event stream produces the same model.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownPageError, ValidationError
from .model import Model

DEFAULT_DEMOTE_THRESHOLD = 100
DEFAULT_RECENCY_WINDOW = 25
DEFAULT_SWEEP_PERIOD = 50


@dataclass(frozen=True)
class UpdateConfig:
    """Tick thresholds driving the periodic sweeps; all strictly positive."""

    demote_threshold: int = DEFAULT_DEMOTE_THRESHOLD
    recency_window: int = DEFAULT_RECENCY_WINDOW
    sweep_period: int = DEFAULT_SWEEP_PERIOD

    def __post_init__(self):
        for name in ("demote_threshold", "recency_window", "sweep_period"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class SessionEvent:
    """One observed request within a session."""

    session_id: str
    url: str
    tick: int


@dataclass(frozen=True)
class ModificationEvent:
    """A page changed content at `tick`."""

    url: str
    tick: int


@dataclass(frozen=True)
class SweepEvent:
    """Run both periodic sweeps (demotion first) at `tick`."""

    tick: int


@dataclass(frozen=True)
class ModelDelta:
    """URLs whose level changed while handling one event."""

    promoted: tuple[str, ...] = ()
    demoted: tuple[str, ...] = ()


def record_access(model: Model, url: str, now: int) -> bool:
    """Apply one access; returns True when the page was promoted.

    Pages already at the top level only get their timestamp refreshed (no
    counter is kept there).  Below the top, the counter runs 0..L-1 and the
    L-th access promotes one level, resetting counter and timestamp.
    """
    rec = model.records.get(url)
    if rec is None:
        raise UnknownPageError(url)
    if rec.level >= model.levels:
        rec.ts = now
        return False
    if rec.lc < model.levels - 1:
        rec.lc += 1
        rec.ts = now
        return False
    rec.level += 1
    rec.lc = 0
    rec.ts = now
    return True


def record_modification(model: Model, url: str, now: int) -> None:
    """Note a content change; level movement happens at the next sweep."""
    rec = model.records.get(url)
    if rec is None:
        raise UnknownPageError(url)
    rec.dm = now


def demotion_sweep(model: Model, cfg: UpdateConfig, now: int) -> list[str]:
    """Drop every page idle for demote_threshold ticks one level (floor 1)."""
    demoted = []
    for rec in model.records.values():
        if rec.level > 1 and now - rec.ts >= cfg.demote_threshold:
            rec.level -= 1
            rec.lc = 0
            rec.ts = now
            demoted.append(rec.url)
    return demoted


def modification_sweep(model: Model, cfg: UpdateConfig, now: int) -> list[str]:
    """Raise pages modified within recency_window one level (cap L).

    Each page's newest examined dm is remembered, so a single modification is
    considered by exactly one sweep and can promote at most once.
    """
    promoted = []
    for rec in model.records.values():
        if rec.dm <= rec.dm_seen:
            continue
        if now - rec.dm <= cfg.recency_window and rec.level < model.levels:
            rec.level += 1
            rec.lc = 0
            rec.ts = now
            promoted.append(rec.url)
        rec.dm_seen = rec.dm
    return promoted


def apply_event(
    model: Model,
    cfg: UpdateConfig,
    event: SessionEvent | ModificationEvent | SweepEvent,
) -> ModelDelta:
    """Dispatch one event and advance the model clock monotonically."""
    if not isinstance(event, (SessionEvent, ModificationEvent, SweepEvent)):
        raise TypeError(f"unsupported event {event!r}")
    model.tick = max(model.tick, event.tick)
    if isinstance(event, SessionEvent):
        promoted = record_access(model, event.url, event.tick)
        return ModelDelta(promoted=(event.url,) if promoted else ())
    if isinstance(event, ModificationEvent):
        record_modification(model, event.url, event.tick)
        return ModelDelta()
    demoted = demotion_sweep(model, cfg, event.tick)
    promoted = modification_sweep(model, cfg, event.tick)
    return ModelDelta(promoted=tuple(promoted), demoted=tuple(demoted))
