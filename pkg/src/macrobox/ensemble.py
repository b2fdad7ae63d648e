"""Microscopic models of N bipartite pairs (2N particles).

A model answers exact joint probabilities for arbitrary per-particle setting
assignments.  Two kinds are supported: independent identical pairs built
from one :class:`~macrobox.boxes.PairBox`, and explicit joint tables which
may encode arbitrary (even signalling) correlations.  Marginal extraction
verifies no-signalling at call time instead of trusting model invariants,
so crafted signalling tables are rejected loudly.

Exhaustive operations enumerate up to 4^N outcome tuples; they refuse
N above the desk bound (default 12, override via MACROBOX_MAX_N or an
explicit ``allow_large`` flag).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .boxes import (
    ALICE,
    BOB,
    ONE,
    OUTCOMES,
    ZERO,
    PairBox,
    ValidationReport,
    Violation,
    as_rational,
    validate_pairbox,
)
from .errors import ConstructionError, DeskBoundError, DomainError, SignallingError

DESK_BOUND_DEFAULT = 12
DESK_BOUND_ENV_VAR = "MACROBOX_MAX_N"


def desk_bound() -> int:
    """Largest N exhaustive enumerations accept without an override."""
    raw = os.environ.get(DESK_BOUND_ENV_VAR)
    if raw is None:
        return DESK_BOUND_DEFAULT
    try:
        return int(raw)
    except ValueError as exc:
        raise DomainError(f"{DESK_BOUND_ENV_VAR} must be an integer, got {raw!r}") from exc


def ensure_desk_scale(n: int, operation: str, allow_large: bool = False) -> None:
    """Refuse exhaustive work beyond the desk bound unless overridden.

    Enumeration cost grows like O(4^N * s^N); the bound keeps runtimes
    predictable.
    """
    bound = desk_bound()
    if n > bound and not allow_large:
        raise DeskBoundError(
            f"{operation} enumerates O(4^N) terms and n={n} exceeds the desk "
            f"bound {bound}; pass allow_large=True (CLI: --allow-large) or set "
            f"{DESK_BOUND_ENV_VAR} to proceed")


@dataclass(frozen=True)
class SettingAssignment:
    """One measurement setting per particle on each side."""

    alice: tuple
    bob: tuple

    @staticmethod
    def uniform(n: int, i: int, j: int) -> "SettingAssignment":
        """All Alice particles measured at ``i``, all Bob particles at ``j``."""
        return SettingAssignment(alice=(i,) * n, bob=(j,) * n)


@dataclass(frozen=True)
class OutcomeAssignment:
    """One +1/-1 outcome per particle on each side."""

    alice: tuple
    bob: tuple


class EnsembleModel:
    """Base interface: N pairs with s_a/s_b settings per side."""

    n: int
    s_a: int
    s_b: int

    def joint_probability(self, settings: SettingAssignment,
                          outcomes: OutcomeAssignment) -> Fraction:
        self._check_dimensions(settings, outcomes)
        return self._joint(settings, outcomes)

    def _joint(self, settings: SettingAssignment,
               outcomes: OutcomeAssignment) -> Fraction:
        """Same as joint_probability, without argument validation.

        Internal enumeration loops build their assignments themselves and
        call this directly; the per-call checks would dominate 4^N scans.
        """
        raise NotImplementedError

    def _check_dimensions(self, settings: SettingAssignment,
                          outcomes: OutcomeAssignment) -> None:
        if len(settings.alice) != self.n or len(settings.bob) != self.n:
            raise DomainError(
                f"setting assignment does not match n={self.n}: "
                f"{len(settings.alice)} alice / {len(settings.bob)} bob entries")
        if len(outcomes.alice) != self.n or len(outcomes.bob) != self.n:
            raise DomainError(
                f"outcome assignment does not match n={self.n}: "
                f"{len(outcomes.alice)} alice / {len(outcomes.bob)} bob entries")
        for i in settings.alice:
            if not (0 <= i < self.s_a):
                raise DomainError(f"alice setting {i} out of range (s_a={self.s_a})")
        for j in settings.bob:
            if not (0 <= j < self.s_b):
                raise DomainError(f"bob setting {j} out of range (s_b={self.s_b})")
        for v in outcomes.alice + outcomes.bob:
            if v not in OUTCOMES:
                raise DomainError(f"outcomes must be +1 or -1, got {v}")


@dataclass(frozen=True)
class IndependentPairs(EnsembleModel):
    """N independent copies of one pair box; probabilities factorize per pair."""

    box: PairBox
    n: int

    @property
    def s_a(self) -> int:
        return self.box.s_a

    @property
    def s_b(self) -> int:
        return self.box.s_b

    def _joint(self, settings: SettingAssignment,
               outcomes: OutcomeAssignment) -> Fraction:
        table = self.box.table
        p = ONE
        for k in range(self.n):
            cell = table.get((settings.alice[k], settings.bob[k],
                              outcomes.alice[k], outcomes.bob[k]), ZERO)
            if cell == 0:
                return ZERO
            p *= cell
        return p


@dataclass(frozen=True)
class ExplicitJoint(EnsembleModel):
    """Arbitrary joint table, keyed by (alice settings, bob settings).

    Each setting assignment maps to a dict over (alice outcomes, bob
    outcomes); omitted outcome entries are zero.  Normalization and
    nonnegativity are enforced at construction, but no-signalling is not:
    signalling tables are constructible on purpose and flagged later by
    :func:`check_no_signalling` or by marginal completion checks.
    """

    n: int
    s_a: int
    s_b: int
    table: Mapping

    def _joint(self, settings: SettingAssignment,
               outcomes: OutcomeAssignment) -> Fraction:
        block = self.table.get((settings.alice, settings.bob))
        if block is None:
            raise DomainError(
                f"no table entry for settings {settings.alice};{settings.bob}")
        return block.get((outcomes.alice, outcomes.bob), ZERO)


def independent_pairs(box: PairBox, n: int) -> IndependentPairs:
    """Model of ``n`` independent copies of ``box``."""
    if n < 1:
        raise DomainError(f"need at least one pair, got n={n}")
    report = validate_pairbox(box)
    if not report.ok:
        raise ConstructionError(f"pair box is invalid: {report}")
    return IndependentPairs(box=box, n=n)


def explicit_joint(n: int, s_a: int, s_b: int, table: Mapping) -> ExplicitJoint:
    """Wrap an explicit joint table, checking normalization per assignment."""
    if n < 1:
        raise DomainError(f"need at least one pair, got n={n}")
    if s_a < 1 or s_b < 1:
        raise DomainError("each side needs at least one setting")
    if not table:
        raise ConstructionError("empty joint table")
    normalized = {}
    for key, block in table.items():
        sa, sb = tuple(key[0]), tuple(key[1])
        normalized[(sa, sb)] = {
            (tuple(ok[0]), tuple(ok[1])): as_rational(p)
            for ok, p in block.items()
        }
    for sa in product(range(s_a), repeat=n):
        for sb in product(range(s_b), repeat=n):
            block = normalized.get((sa, sb))
            total = ZERO
            if block:
                for (oa, ob), p in block.items():
                    if len(oa) != n or len(ob) != n:
                        raise ConstructionError(
                            f"outcome tuple length mismatch at settings {sa};{sb}")
                    if p < 0:
                        raise ConstructionError(
                            f"negative probability {p} at settings {sa};{sb}, "
                            f"outcomes {oa};{ob}")
                    total += p
            if total != 1:
                raise ConstructionError(
                    f"outcomes for setting assignment {sa};{sb} sum to {total}, not 1")
    return ExplicitJoint(n=n, s_a=s_a, s_b=s_b, table=normalized)


def explicit_joint_from_json(text: str) -> ExplicitJoint:
    """Load a joint table from its JSON form (omitted entries are zero)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConstructionError(f"invalid joint-table JSON: {exc}") from exc
    try:
        n = int(data["n"])
        s_a = int(data["s_a"])
        s_b = int(data["s_b"])
        entries = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConstructionError(f"malformed joint-table JSON: {exc}") from exc
    table: dict = {}
    for entry in entries:
        try:
            sa = tuple(int(v) for v in entry["settings_a"])
            sb = tuple(int(v) for v in entry["settings_b"])
            oa = tuple(int(v) for v in entry["outcomes_a"])
            ob = tuple(int(v) for v in entry["outcomes_b"])
            p = as_rational(entry["p"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConstructionError(f"malformed joint-table entry {entry!r}") from exc
        block = table.setdefault((sa, sb), {})
        block[(oa, ob)] = block.get((oa, ob), ZERO) + p
    return explicit_joint(n, s_a, s_b, table)


def _normalize_spec(model: EnsembleModel, spec: Sequence) -> tuple:
    """Validate a marginal spec: (side, particle, setting) triples."""
    seen = set()
    slots = []
    for entry in spec:
        side, particle, setting = entry
        if side not in (ALICE, BOB):
            raise DomainError(f"side must be {ALICE!r} or {BOB!r}, got {side!r}")
        if not (0 <= particle < model.n):
            raise DomainError(
                f"particle index {particle} out of range for n={model.n}")
        limit = model.s_a if side == ALICE else model.s_b
        if not (0 <= setting < limit):
            raise DomainError(f"setting {setting} out of range for side {side}")
        if (side, particle) in seen:
            raise DomainError(f"particle ({side}, {particle}) listed twice")
        seen.add((side, particle))
        slots.append((side, particle, setting))
    return tuple(slots)


def _marginal_by_enumeration(model: EnsembleModel, slots: tuple,
                             fill_a: int, fill_b: int) -> dict:
    """Marginal via full 4^N outcome enumeration with fixed completion settings."""
    settings_a = [fill_a] * model.n
    settings_b = [fill_b] * model.n
    positions = []
    for side, particle, setting in slots:
        if side == ALICE:
            settings_a[particle] = setting
            positions.append(particle)
        else:
            settings_b[particle] = setting
            positions.append(model.n + particle)
    settings = SettingAssignment(alice=tuple(settings_a), bob=tuple(settings_b))
    dist: dict = {}
    for combined in product(OUTCOMES, repeat=2 * model.n):
        outcomes = OutcomeAssignment(alice=combined[:model.n], bob=combined[model.n:])
        p = model._joint(settings, outcomes)
        if p == 0:
            continue
        key = tuple(combined[pos] for pos in positions)
        dist[key] = dist.get(key, ZERO) + p
    return dist


def _marginal_product_model(model: IndependentPairs, slots: tuple,
                            fill_a: int, fill_b: int) -> dict:
    """Marginal of a product model: one box factor per involved pair.

    A particle whose partner slot is not listed is summed out through the
    completion setting ``fill_a``/``fill_b`` on the opposite side, which is
    exactly where a signalling box would leak.
    """
    per_pair: dict = {}
    for side, particle, setting in slots:
        per_pair.setdefault(particle, {})[side] = setting
    factors = []  # (pair slots in spec order, factor table)
    for particle, sides in per_pair.items():
        if ALICE in sides and BOB in sides:
            i, j = sides[ALICE], sides[BOB]
            table = {(x, y): model.box.prob(i, j, x, y)
                     for x in OUTCOMES for y in OUTCOMES}
            local = [(ALICE, particle), (BOB, particle)]
        elif ALICE in sides:
            i = sides[ALICE]
            table = {(x,): model.box.marginal_a(i, x, j=fill_b) for x in OUTCOMES}
            local = [(ALICE, particle)]
        else:
            j = sides[BOB]
            table = {(y,): model.box.marginal_b(j, y, i=fill_a) for y in OUTCOMES}
            local = [(BOB, particle)]
        factors.append((local, table))
    # Assemble the product distribution over the requested slot order.
    slot_order = [(side, particle) for side, particle, _ in slots]
    dist: dict = {}
    for assignment in product(OUTCOMES, repeat=len(slot_order)):
        value = dict(zip(slot_order, assignment))
        p = ONE
        for local, table in factors:
            p *= table[tuple(value[s] for s in local)]
            if p == 0:
                break
        if p != 0:
            dist[assignment] = p
    return dist


def marginal(model: EnsembleModel, spec: Sequence, verify: bool = True) -> dict:
    """Exact marginal over the listed (side, particle, setting) slots.

    Unlisted particles are given an arbitrary completion setting and summed
    out.  With ``verify`` (the default) the computation runs under two
    distinct completions and must agree exactly; a mismatch means the model
    signals and raises :class:`SignallingError` carrying both values.

    Returns a dict mapping outcome tuples (in spec order) to probabilities;
    outcome tuples with zero probability are omitted.
    """
    slots = _normalize_spec(model, spec)
    if isinstance(model, IndependentPairs):
        compute = lambda fa, fb: _marginal_product_model(model, slots, fa, fb)
    else:
        compute = lambda fa, fb: _marginal_by_enumeration(model, slots, fa, fb)
    first = compute(0, 0)
    if verify:
        alt_a = 1 if model.s_a > 1 else 0
        alt_b = 1 if model.s_b > 1 else 0
        if (alt_a, alt_b) != (0, 0):
            second = compute(alt_a, alt_b)
            if second != first:
                raise SignallingError(
                    f"marginal over {slots} depends on the completion settings "
                    f"(fill ({0},{0}) vs ({alt_a},{alt_b})): the model signals",
                    first=first, second=second)
    return first


def marginal_correlator(model: EnsembleModel, spec: Sequence,
                        verify: bool = True) -> Fraction:
    """Expectation of the product of the listed slots' outcomes."""
    dist = marginal(model, spec, verify=verify)
    total = ZERO
    for outcomes, p in dist.items():
        sign = 1
        for o in outcomes:
            sign *= o
        total += sign * p
    return total


def check_no_signalling(model: EnsembleModel, allow_large: bool = False) -> ValidationReport:
    """Exhaustively compare marginals over all single-particle setting swaps.

    For every particle, every pair of its settings, and every setting context
    of the remaining 2N-1 particles, the distribution of all other outcomes
    must be unchanged.  Cost is O(s^(2N) * 4^N), hence desk-bounded.
    """
    ensure_desk_scale(model.n, "check_no_signalling", allow_large)
    n = model.n
    violations = []
    sides = [(ALICE, model.s_a), (BOB, model.s_b)]
    for side, s_count in sides:
        if s_count < 2:
            continue
        for particle in range(n):
            for context_a in product(range(model.s_a), repeat=n):
                for context_b in product(range(model.s_b), repeat=n):
                    if side == ALICE and context_a[particle] != 0:
                        continue  # pin the swapped slot; loop below swaps it
                    if side == BOB and context_b[particle] != 0:
                        continue
                    dists = []
                    for swapped in range(s_count):
                        if side == ALICE:
                            ctx_a = list(context_a)
                            ctx_a[particle] = swapped
                            settings = SettingAssignment(tuple(ctx_a), context_b)
                        else:
                            ctx_b = list(context_b)
                            ctx_b[particle] = swapped
                            settings = SettingAssignment(context_a, tuple(ctx_b))
                        skip = particle if side == ALICE else n + particle
                        dist: dict = {}
                        for combined in product(OUTCOMES, repeat=2 * n):
                            outcomes = OutcomeAssignment(
                                alice=combined[:n], bob=combined[n:])
                            p = model._joint(settings, outcomes)
                            if p == 0:
                                continue
                            key = combined[:skip] + combined[skip + 1:]
                            dist[key] = dist.get(key, ZERO) + p
                        dists.append((swapped, dist))
                    base_setting, base = dists[0]
                    for swapped, other in dists[1:]:
                        if other != base:
                            keys = set(base) | set(other)
                            worst = max(
                                keys,
                                key=lambda k: abs(other.get(k, ZERO) - base.get(k, ZERO)))
                            residual = other.get(worst, ZERO) - base.get(worst, ZERO)
                            violations.append(Violation(
                                kind="no-signalling",
                                where=(side, particle, base_setting, swapped,
                                       context_a, context_b),
                                residual=residual,
                                detail=(f"marginal of the other particles changes when "
                                        f"({side},{particle}) swaps setting "
                                        f"{base_setting} -> {swapped}")))
    return ValidationReport(violations=tuple(violations))
