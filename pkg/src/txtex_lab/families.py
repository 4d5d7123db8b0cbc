"""Indexed families of target sets with analytic minimal indices.

Each constructor returns an immutable IndexedFamily: exact membership, a
minimal index for every index, a separation bound under which distinct
members provably differ, and canonical texts.  The diagonalizing families
(marked self-description, trap sets) take the attacked learner from a
registry and run their searches at construction time.
"""

from __future__ import annotations

import json
from typing import Iterable

from . import adversary
from .codec import (
    canonical_decode,
    canonical_encode,
    decode_tuple,
    encode_tuple,
    pair,
    poly_decode,
    poly_eval,
    unpair,
)
from .descriptor import build_descriptor
from .registry import LearnerRegistry
from .sets import ColumnBlock, FiniteSet, Interval, Join, SetSpec, Staged, Union
from .text import Text, make_text

BASIC_KINDS = (
    "up-intervals",
    "pair-intervals",
    "tuple-contents",
    "finite-canonical",
    "pow2",
    "join-singletons",
    "pcs-G",
)


class UnknownIndexError(ValueError):
    """The family defines no member at this index."""


class UnresolvedIndexError(RuntimeError):
    """The member at this index needs a search that ran out of budget."""


class EmptyTargetError(ValueError):
    """The member at this index is empty; no text of it exists."""


class IndexedFamily:
    name = "family"

    def member(self, n: int) -> SetSpec:
        raise NotImplementedError

    def exact_membership(self, n: int, x: int) -> bool:
        return self.member(n).contains(x)

    def min_index(self, n: int) -> int:
        raise NotImplementedError

    def separation_bound(self, indices: Iterable[int]) -> int:
        """Universe under which the sampled members are pairwise decided.

        Default implementation covers families of finite members: equality on
        [0, max element] is genuine equality.
        """
        bound = 0
        for n in indices:
            for x in self.member(n).iter_increasing():
                bound = max(bound, x)
        return bound + 1

    def canonical_text(self, n: int) -> Text:
        return make_text("canonical", self.member(n))

    def manifest(self) -> dict:
        return {"family": self.name}

    def manifest_json(self) -> str:
        return json.dumps(self.manifest(), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# basic families


class UpIntervals(IndexedFamily):
    name = "up-intervals"

    def member(self, n):
        return Interval(n, None)

    def min_index(self, n):
        return n

    def separation_bound(self, indices):
        return max(indices) + 1


class PairIntervals(IndexedFamily):
    name = "pair-intervals"

    def member(self, n):
        lo, hi = unpair(n)
        return Interval(lo, hi)

    def min_index(self, n):
        lo, hi = unpair(n)
        if lo <= hi:
            return n
        return pair(1, 0)  # least code of the empty interval

    def separation_bound(self, indices):
        return max(indices) + 1


class TupleContents(IndexedFamily):
    """Contents of decoded (k+1)-tuples."""

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("tuple-contents needs k >= 1")
        self.k = k
        self.name = f"tuple-contents({k})"

    def member(self, n):
        return FiniteSet(decode_tuple(n, self.k + 1))

    def min_index(self, n):
        content = set(decode_tuple(n, self.k + 1))
        for candidate in range(n + 1):
            if set(decode_tuple(candidate, self.k + 1)) == content:
                return candidate
        return n

    def separation_bound(self, indices):
        return max(indices) + 1


class FiniteCanonical(IndexedFamily):
    """All finite sets, with minimal index <size, bitmask code>.

    Codes whose size tag disagrees with their bitmask are filled with the
    infinite tail [code, infinity): any finite filler would steal some finite
    set's minimal index, while the tails are pairwise distinct and never
    collide with a finite member.
    """

    name = "finite-canonical"

    def member(self, n):
        size, mask = unpair(n)
        content = canonical_decode(mask)
        if len(content) == size:
            return FiniteSet(content)
        return Interval(n, None)

    def min_index(self, n):
        size, mask = unpair(n)
        content = canonical_decode(mask)
        if len(content) == size:
            return n
        return n  # tails occur at exactly one code

    def separation_bound(self, indices):
        return max(indices) + 1

    def index_of_set(self, content) -> int:
        content = frozenset(content)
        return pair(len(content), canonical_encode(content))


class Pow2(IndexedFamily):
    name = "pow2"

    def member(self, n):
        return Interval(0, 2**n)

    def min_index(self, n):
        return n

    def separation_bound(self, indices):
        return 2 ** max(indices) + 2


class JoinSingletons(IndexedFamily):
    name = "join-singletons"

    def member(self, n):
        return Join(FiniteSet({n}), Interval(0, None))

    def min_index(self, n):
        return n

    def separation_bound(self, indices):
        return 2 * max(indices) + 2


class PcsG(IndexedFamily):
    """The naturals at index 0, initial segments [0, n] above."""

    name = "pcs-G"

    def member(self, n):
        if n == 0:
            return Interval(0, None)
        return Interval(0, n)

    def min_index(self, n):
        return n

    def separation_bound(self, indices):
        return max(indices) + 2


def make_basic_family(kind: str, k: int | None = None) -> IndexedFamily:
    if kind == "up-intervals":
        return UpIntervals()
    if kind == "pair-intervals":
        return PairIntervals()
    if kind == "tuple-contents":
        return TupleContents(k if k is not None else 1)
    if kind == "finite-canonical":
        return FiniteCanonical()
    if kind == "pow2":
        return Pow2()
    if kind == "join-singletons":
        return JoinSingletons()
    if kind == "pcs-G":
        return PcsG()
    raise ValueError(f"unknown basic family kind {kind!r}")


# ---------------------------------------------------------------------------
# marked self-describing families


def _require_increasing_poly(p_code: int) -> None:
    coeffs = poly_decode(p_code)
    if len(coeffs) < 2 or all(c == 0 for c in coeffs[1:]):
        raise ValueError("polynomial must be increasing (some coefficient at degree >= 1)")


class MsdFamily(IndexedFamily):
    """Every member is a descriptor whose described number is its own index.

    The two targeted indices <m, p*, 0> and <m, p*, 1> hide everything except
    the markers above the attacked learner's query ceiling; all other indices
    get a plain single-marker descriptor with floor 0.
    """

    def __init__(self, registry: LearnerRegistry, m_id: int, p_code: int, variant: str = "single"):
        if variant not in ("single", "multi"):
            raise ValueError(f"unknown marker variant {variant}")
        _require_increasing_poly(p_code)
        registry.get(m_id)  # unregistered ids fail here
        self.m_id = m_id
        self.p_code = p_code
        self.variant = variant
        self.name = f"msd({variant},m={m_id})"
        self.targeted = (encode_tuple([m_id, p_code, 0]), encode_tuple([m_id, p_code, 1]))
        self.ell = poly_eval(p_code, self.targeted[1])
        self.query_ceiling = adversary.compute_q(registry, m_id, self.ell, variant)
        if variant == "single":
            self.markers = frozenset({adversary.marker_element(0)})
        else:
            self.markers = frozenset(adversary.marker_element(j) for j in range(self.ell + 1))
        self.floor = max(self.query_ceiling, max(self.markers))
        self._cache: dict[int, FiniteSet] = {}

    def member(self, n):
        if n not in self._cache:
            m, pstar, i = decode_tuple(n, 3)
            if (m, pstar) == (self.m_id, self.p_code) and i in (0, 1):
                built = build_descriptor(n, 0, self.floor, self.markers)
            else:
                built = build_descriptor(n, 0, 0, {adversary.marker_element(0)})
            self._cache[n] = FiniteSet(built.elements)
        return self._cache[n]

    def min_index(self, n):
        return n  # described numbers differ, so members are pairwise distinct

    def manifest(self):
        return {
            "family": self.name,
            "variant": self.variant,
            "learner_id": self.m_id,
            "poly_code": self.p_code,
            "targeted_indices": list(self.targeted),
            "marker_count": len(self.markers),
            "query_ceiling": self.query_ceiling,
            "floor": self.floor,
        }


def make_msd(
    registry: LearnerRegistry, m_id: int, p_code: int, variant: str = "single"
) -> MsdFamily:
    return MsdFamily(registry, m_id, p_code, variant)


# ---------------------------------------------------------------------------
# column self-describing families


class CsdTable:
    """The anchor sequence and column structure behind chain families.

    anchor(i) is defined by a(i) = mult*(i+1) + sum_{j<i} poly_j(mult * a(j)),
    with poly_j the polynomial coded by j.  Member sets are unions of column
    blocks: the chain-top set at anchor index i stacks columns 0..top(i) and
    the chain members below it stop at lower columns.
    """

    def __init__(self, multiplier: int = 1):
        self.multiplier = multiplier
        self._anchors = [multiplier]  # a(0) = mult * 1

    def anchor(self, i: int) -> int:
        while len(self._anchors) <= i:
            n = len(self._anchors)
            total = self.multiplier * (n + 1)
            total += sum(
                poly_eval(j, self.multiplier * self._anchors[j]) for j in range(n)
            )
            self._anchors.append(total)
        return self._anchors[i]

    def top(self, i: int) -> int:
        """Width of the column stack at anchor i: poly_i(anchor(i))."""
        return poly_eval(i, self.anchor(i))

    def locate_index(self, n: int) -> tuple[str, int, int, bool]:
        """Map index n to ('top', i, 0, canonical) or ('chain', i, j, canonical).

        With multiplier 1 the anchors and chain slots partition the naturals
        exactly; larger multipliers leave surplus slots, which duplicate the
        nearest chain-top set below them (canonical=False) so the family stays
        total without disturbing any genuine member's minimal index.
        """
        if n == 0:
            return "top", 0, 0, True
        if n < self.anchor(0):
            return "top", 0, 0, False
        i = 0
        while self.anchor(i + 1) <= n:
            i += 1
        a = self.anchor(i)
        if n == a:
            return "top", i, 0, True
        j = n - a - 1
        if j >= self.top(i):
            return "top", i, 0, False
        return "chain", i, j, True

    def top_set(self, i: int) -> SetSpec:
        a = self.anchor(i)
        width = self.top(i)
        blocks = [ColumnBlock(0, a, width)]
        blocks += [ColumnBlock(0, a + j, j) for j in range(width)]
        return Union(blocks)

    def chain_set(self, i: int, j: int) -> SetSpec:
        a = self.anchor(i)
        return Union([ColumnBlock(0, a + l, l) for l in range(j + 1)])

    def member(self, n: int) -> SetSpec:
        kind, i, j, _ = self.locate_index(n)
        return self.top_set(i) if kind == "top" else self.chain_set(i, j)

    def min_index(self, n: int) -> int:
        kind, i, j, canonical = self.locate_index(n)
        if kind == "top":
            return self.index_of_top(i)
        return n if canonical else self.index_of_chain(i, j)

    def index_of_top(self, i: int) -> int:
        return 0 if i == 0 else self.anchor(i)

    def index_of_chain(self, i: int, j: int) -> int:
        return self.anchor(i) + 1 + j

    def anchors_up_to(self, count: int) -> list[int]:
        return [self.anchor(i) for i in range(count)]

    def identify(self, top_column: int, greatest: int) -> list[tuple[str, int, int]]:
        """Candidate locations whose top column and widest base match."""
        candidates = []
        # grow the table past `greatest`
        i = 0
        while self.anchor(i) <= greatest:
            i += 1
        for idx in range(i + 1):
            a = self.anchor(idx)
            if a == greatest and self.top(idx) == top_column:
                candidates.append(("top", idx, 0))
            j = greatest - a
            if 0 <= j < self.top(idx) and j == top_column:
                candidates.append(("chain", idx, j))
        return candidates


class CsdFamily(IndexedFamily):
    name = "csd"

    def __init__(self, multiplier: int = 1):
        self.table = CsdTable(multiplier)
        if multiplier != 1:
            self.name = f"csd(x{multiplier})"

    def member(self, n):
        return self.table.member(n)

    def min_index(self, n):
        return self.table.min_index(n)

    def chain_indices(self, i: int) -> list[int]:
        """Indices of the strict chain below anchor i, top set last."""
        width = self.table.top(i)
        out = [self.table.index_of_chain(i, j) for j in range(width)]
        out.append(self.table.index_of_top(i))
        return out

    def manifest(self):
        return {
            "family": self.name,
            "multiplier": self.table.multiplier,
            "anchors": self.table.anchors_up_to(10),
        }


def make_csd() -> CsdFamily:
    return CsdFamily(1)


# ---------------------------------------------------------------------------
# merged family: chain sets on even indices, descriptor sets on odd


class MergedFamily(IndexedFamily):
    """Interleaves tripled-constant chain sets with marker-trapped descriptors.

    Every even-index member contains 0 (column 0 always holds pair(0,0));
    no odd-index member does (descriptor elements decode with unit tag).
    """

    name = "merged"

    def __init__(self, registry: LearnerRegistry, m_id: int, p_code: int):
        _require_increasing_poly(p_code)
        registry.get(m_id)
        self.m_id = m_id
        self.p_code = p_code
        self.table = CsdTable(3)
        self.targeted = (encode_tuple([m_id, p_code, 0]), encode_tuple([m_id, p_code, 1]))
        self.ell = poly_eval(p_code, 3 * self.targeted[1])
        self.query_ceiling = adversary.compute_q(registry, m_id, self.ell, "single")
        self.markers = frozenset({adversary.marker_element(0)})
        self.floor = max(self.query_ceiling, max(self.markers))
        self._cache: dict[int, SetSpec] = {}

    def _descriptor_member(self, i: int) -> FiniteSet:
        m, pstar, tag = decode_tuple(i, 3)
        if (m, pstar) == (self.m_id, self.p_code) and tag in (0, 1):
            built = build_descriptor(i, 0, self.floor, self.markers)
        else:
            built = build_descriptor(i, 0, 0, {adversary.marker_element(0)})
        return FiniteSet(built.elements)

    def member(self, n):
        if n not in self._cache:
            if n % 2 == 0:
                self._cache[n] = self.table.member(n // 2)
            else:
                self._cache[n] = self._descriptor_member(n // 2)
        return self._cache[n]

    def min_index(self, n):
        if n % 2 == 0:
            return 2 * self.table.min_index(n // 2)
        return n

    def manifest(self):
        return {
            "family": self.name,
            "learner_id": self.m_id,
            "poly_code": self.p_code,
            "anchors": self.table.anchors_up_to(8),
            "query_ceiling": self.query_ceiling,
        }


def make_merged(registry: LearnerRegistry, m_id: int, p_code: int) -> MergedFamily:
    return MergedFamily(registry, m_id, p_code)


# ---------------------------------------------------------------------------
# trap family for the characteristic-sample separation


class TrapParams:
    """Decomposition of a trap parameter k into (learner id, polynomial code)."""

    def __init__(self, k: int):
        self.k = k
        self.learner_id, self.poly_code = unpair(k)

    def matches(self, m_id: int, p_code: int) -> bool:
        return (self.learner_id, self.poly_code) == (m_id, p_code)


class PcsFFamily(IndexedFamily):
    """Even indices: dyadic intervals; odd indices: trap-set members.

    Odd index 2k+1 holds the decoy set plus the interval's left endpoint when
    k decodes to the attacked (learner, polynomial) pair; otherwise just the
    left endpoint.  Searches run at construction for k up to ``max_k``.
    """

    name = "pcs-F"

    def __init__(
        self,
        registry: LearnerRegistry,
        m_id: int,
        p_code: int,
        *,
        max_k: int = 3,
        seed: int = 0,
        search_budgets: dict | None = None,
    ):
        registry.get(m_id)
        self.m_id = m_id
        self.p_code = p_code
        self.max_k = max_k
        budgets = search_budgets or {}
        self.traps: dict[int, adversary.TrapSets] = {}
        for k in range(max_k + 1):
            if TrapParams(k).matches(m_id, p_code):
                self.traps[k] = adversary.search_trap_sets(
                    registry, m_id, p_code, k, seed=seed, **budgets
                )
            else:
                self.traps[k] = adversary.TrapSets(
                    frozenset(), frozenset(), resolved=True, stats={"matched": False, "k": k}
                )

    def left_endpoint(self, k: int) -> int:
        return 2 ** (2 * k + 1) + 1

    def member(self, n):
        k = n // 2
        if n % 2 == 0:
            return adversary.trap_interval(k)
        if k > self.max_k:
            if TrapParams(k).matches(self.m_id, self.p_code):
                raise UnresolvedIndexError(f"trap sets for k={k} were never searched")
            return FiniteSet({self.left_endpoint(k)})
        trap = self.traps[k]
        if not trap.resolved:
            raise UnresolvedIndexError(f"trap search for k={k} exhausted its budget")
        return FiniteSet(set(trap.decoys) | {self.left_endpoint(k)})

    def min_index(self, n):
        return n

    def trap_sets(self, k: int) -> adversary.TrapSets:
        if k not in self.traps:
            raise UnresolvedIndexError(f"trap sets for k={k} were never searched")
        return self.traps[k]

    def manifest(self):
        return {
            "family": self.name,
            "learner_id": self.m_id,
            "poly_code": self.p_code,
            "traps": {
                str(k): {
                    "resolved": t.resolved,
                    "core": sorted(t.trap_core),
                    "decoys": sorted(t.decoys),
                    "stats": t.stats,
                }
                for k, t in self.traps.items()
            },
        }


def make_pcs_f(
    registry: LearnerRegistry,
    m_id: int,
    p_code: int,
    *,
    max_k: int = 3,
    seed: int = 0,
    search_budgets: dict | None = None,
) -> PcsFFamily:
    return PcsFFamily(
        registry, m_id, p_code, max_k=max_k, seed=seed, search_budgets=search_budgets
    )


# ---------------------------------------------------------------------------
# the size-2 characteristic sample family


def decompose_offset_power(n: int) -> tuple[int, int]:
    """Unique (i, k) with n = i + 2**k and 1 <= i <= 2**k; needs n >= 2."""
    if n < 2:
        raise UnknownIndexError(f"{n} has no offset-power decomposition")
    k = 0
    while 2 ** (k + 1) < n:
        k += 1
    i = n - 2**k
    assert 1 <= i <= 2**k
    return i, k


class Thm64Family(IndexedFamily):
    """Even indices join {n} with [0, 2^n]; odd indices join the decomposition."""

    name = "offset-power-joins"

    def member(self, n):
        if n % 2 == 0:
            half = n // 2
            return Join(FiniteSet({half}), Interval(0, 2**half))
        i, k = decompose_offset_power(n // 2)  # raises for indices 1 and 3
        return Join(FiniteSet({k}), Interval(0, i))

    def min_index(self, n):
        if n % 2 == 0:
            return n
        i, k = decompose_offset_power(n // 2)
        if i == 2**k:
            return 2 * k
        return n

    def separation_bound(self, indices):
        bound = 0
        for n in indices:
            half = n // 2
            if n % 2 == 0:
                bound = max(bound, 2 * half, 2 * 2**half + 1)
            else:
                i, k = decompose_offset_power(half)
                bound = max(bound, 2 * k, 2 * i + 1)
        return bound + 1


def make_thm64_g() -> Thm64Family:
    return Thm64Family()


# ---------------------------------------------------------------------------
# halting-style staged family


class HaltingFamily(IndexedFamily):
    """Pairs {2i} / {2i, 2i+1} under a staged parameter set, with tower aliases.

    Index 2i+1 holds {2i}, plus 2i+1 once i enters the parameter set; towers
    2^(2^i) always hold the pair.  Other even indices are empty and refused as
    targets.  Membership is resolved at the stage bound fixed at construction.
    """

    name = "halting"

    def __init__(self, parameter_set, stage: int = 64):
        if callable(parameter_set):
            self._stage_fn = parameter_set
        else:
            fixed = frozenset(parameter_set)
            self._stage_fn = lambda s: fixed
        self.stage = stage

    def staged_spec(self, i: int) -> Staged:
        """The odd slot 2i+1 as a staged shape (for stage-monotonicity checks)."""
        return Staged(
            lambda s, i=i: frozenset({2 * i} | ({2 * i + 1} if i in self._stage_fn(s) else set()))
        )

    def _in_parameter_set(self, i: int, stage: int) -> bool:
        return i in self._stage_fn(stage)

    @staticmethod
    def tower_exponent(n: int) -> int | None:
        """i when n == 2^(2^i), else None."""
        if n < 2 or n & (n - 1):
            return None
        e = n.bit_length() - 1
        if e & (e - 1):
            return None
        return e.bit_length() - 1

    def member_at_stage(self, n: int, stage: int) -> FiniteSet:
        if n % 2 == 1:
            i = n // 2
            content = {2 * i}
            if self._in_parameter_set(i, stage):
                content.add(2 * i + 1)
            return FiniteSet(content)
        i = self.tower_exponent(n)
        if i is None:
            raise EmptyTargetError(f"index {n} codes the empty set")
        return FiniteSet({2 * i, 2 * i + 1})

    def member(self, n):
        return self.member_at_stage(n, self.stage)

    def min_index(self, n):
        content = self.member(n).as_finite_set()
        i = min(content) // 2
        if len(content) == 1:
            return 2 * i + 1
        if self._in_parameter_set(i, self.stage):
            return 2 * i + 1
        return 2 ** (2**i)


def make_halting_family(parameter_set, stage: int = 64) -> HaltingFamily:
    return HaltingFamily(parameter_set, stage)
