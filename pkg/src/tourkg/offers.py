"""Parametric accommodation booking options and publication heuristics.

An offer space compactly describes every bookable (room, check-in,
nights, persons, board) combination; pricing is exact integer-cent
arithmetic.  Instead of materializing the combinatorial explosion,
`materialize_representatives` selects a few representative offers for
publication, and `price_offer` answers exact queries on demand.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import date, timedelta
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Iterator

from . import vocab

STRATEGIES = ("global-min-first", "per-room-min", "per-month-min")


class OfferSpaceError(ValueError):
    """Raised for malformed offer spaces."""


class OfferBoundsError(ValueError):
    """Raised when a priced tuple violates a space bound; names the bound."""

    def __init__(self, bound: str, message: str):
        super().__init__(f"{bound}: {message}")
        self.bound = bound


def parse_money(value) -> int:
    """EUR amount (number or string) -> integer cents; rejects negatives."""
    try:
        cents = int(
            (Decimal(str(value)) * 100).quantize(Decimal(1), rounding=ROUND_HALF_UP)
        )
    except (InvalidOperation, ValueError, TypeError):
        raise OfferSpaceError(f"bad monetary amount: {value!r}") from None
    if cents < 0:
        raise OfferSpaceError(f"monetary amounts must be >= 0, got {value!r}")
    return cents


def cents_str(cents: int) -> str:
    """Integer cents -> two-decimal rendering ("220.00")."""
    sign = "-" if cents < 0 else ""
    cents = abs(cents)
    return f"{sign}{cents // 100}.{cents % 100:02d}"


def _round_half_up(numerator: int, denominator: int) -> int:
    q, r = divmod(numerator, denominator)
    return q + (1 if 2 * r >= denominator else 0)


def _parse_date(value, where: str) -> date:
    try:
        return date.fromisoformat(value)
    except (TypeError, ValueError):
        raise OfferSpaceError(f"{where}: bad ISO date {value!r}") from None


@dataclass(frozen=True)
class RateInterval:
    start: date  # inclusive
    end: date  # exclusive
    nightly_rate_cents: int


@dataclass(frozen=True)
class RoomType:
    room_id: str
    rates: tuple[RateInterval, ...]  # sorted, non-overlapping, tiling the window


@dataclass(frozen=True)
class BoardOption:
    board_id: str
    surcharge_cents: int  # per person per night


@dataclass(frozen=True)
class OfferSpace:
    accommodation_id: str
    room_types: tuple[RoomType, ...]
    occupancy: tuple[int, int]  # min, max persons
    per_person_surcharge_cents: int  # per extra person per night beyond 1
    board_options: tuple[BoardOption, ...]
    stay_lengths: tuple[int, int]  # min, max nights

    @property
    def validity(self) -> tuple[date, date]:
        """Half-open validity window covered by every room's rate table."""
        starts = [r.rates[0].start for r in self.room_types]
        ends = [r.rates[-1].end for r in self.room_types]
        return min(starts), max(ends)

    def room(self, room_id: str) -> RoomType:
        for r in self.room_types:
            if r.room_id == room_id:
                return r
        raise OfferBoundsError("room-id", f"unknown room {room_id!r}")

    def board(self, board_id: str) -> BoardOption:
        for b in self.board_options:
            if b.board_id == board_id:
                return b
        raise OfferBoundsError("board-id", f"unknown board option {board_id!r}")


@dataclass(frozen=True)
class ConcreteOffer:
    """A priced (room, check-in, nights, persons, board) tuple.

    `total_cents` is exact; the per-person-per-night price is exact as a
    fraction and rounded half-up to cents only for rendering.
    """

    accommodation_id: str
    room_id: str
    check_in: date
    nights: int
    persons: int
    board_id: str
    total_cents: int

    @property
    def check_out(self) -> date:
        return self.check_in + timedelta(days=self.nights)

    @property
    def price_per_person_per_night(self) -> Fraction:
        return Fraction(self.total_cents, self.persons * self.nights)

    @property
    def price_per_person_per_night_cents(self) -> int:
        return _round_half_up(self.total_cents, self.persons * self.nights)

    @property
    def offer_id(self) -> str:
        key = "|".join(
            (
                self.accommodation_id,
                self.room_id,
                self.check_in.isoformat(),
                str(self.nights),
                str(self.persons),
                self.board_id,
            )
        )
        return "urn:kg:offer:" + hashlib.sha256(key.encode("utf-8")).hexdigest()[:24]

    def sort_key(self):
        """Deterministic tie-break: price, check-in, room, board, nights, persons."""
        return (
            self.total_cents,
            self.check_in,
            self.room_id,
            self.board_id,
            self.nights,
            self.persons,
        )


def load_offer_space(text: str) -> OfferSpace:
    """Parse the JSON offer-space format and check its invariants."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OfferSpaceError(f"invalid JSON: {exc}") from None
    return offer_space_from_dict(obj)


def offer_space_from_dict(obj: dict) -> OfferSpace:
    if not isinstance(obj, dict):
        raise OfferSpaceError("offer space must be a JSON object")
    acc = obj.get("accommodationId")
    if not isinstance(acc, str) or ":" not in acc:
        raise OfferSpaceError(f"accommodationId must be an absolute IRI, got {acc!r}")
    rooms_in = obj.get("roomTypes")
    if not isinstance(rooms_in, list) or not rooms_in:
        raise OfferSpaceError("roomTypes must be a non-empty list")
    rooms: list[RoomType] = []
    for i, r in enumerate(rooms_in):
        where = f"roomTypes[{i}]"
        room_id = r.get("roomId")
        if not isinstance(room_id, str) or not room_id:
            raise OfferSpaceError(f"{where}: missing roomId")
        rates_in = r.get("rates")
        if not isinstance(rates_in, list) or not rates_in:
            raise OfferSpaceError(f"{where}: rates must be a non-empty list")
        intervals = []
        for j, e in enumerate(rates_in):
            start = _parse_date(e.get("from"), f"{where}.rates[{j}].from")
            end = _parse_date(e.get("to"), f"{where}.rates[{j}].to")
            if not start < end:
                raise OfferSpaceError(f"{where}.rates[{j}]: empty interval [{start}, {end})")
            intervals.append(RateInterval(start, end, parse_money(e.get("nightlyRate"))))
        intervals.sort(key=lambda iv: iv.start)
        for prev, cur in zip(intervals, intervals[1:]):
            if prev.end > cur.start:
                raise OfferSpaceError(f"{where}: overlapping rate intervals at {cur.start}")
            if prev.end < cur.start:
                raise OfferSpaceError(f"{where}: rate gap between {prev.end} and {cur.start}")
        rooms.append(RoomType(room_id, tuple(intervals)))
    window_start = min(r.rates[0].start for r in rooms)
    window_end = max(r.rates[-1].end for r in rooms)
    for r in rooms:
        if r.rates[0].start != window_start or r.rates[-1].end != window_end:
            raise OfferSpaceError(
                f"room {r.room_id!r} does not cover the validity window "
                f"[{window_start}, {window_end})"
            )
    occ = obj.get("occupancy", {})
    occ_min, occ_max = int(occ.get("min", 1)), int(occ.get("max", 1))
    stay = obj.get("stayLengths", {})
    stay_min, stay_max = int(stay.get("min", 1)), int(stay.get("max", 1))
    if not (1 <= occ_min <= occ_max):
        raise OfferSpaceError(f"occupancy must satisfy 1 <= min <= max, got {occ_min}..{occ_max}")
    if not (1 <= stay_min <= stay_max):
        raise OfferSpaceError(f"stayLengths must satisfy 1 <= min <= max, got {stay_min}..{stay_max}")
    boards_in = obj.get("boardOptions")
    if not isinstance(boards_in, list) or not boards_in:
        raise OfferSpaceError("boardOptions must be a non-empty list")
    boards = []
    for i, b in enumerate(boards_in):
        board_id = b.get("boardId")
        if not isinstance(board_id, str) or not board_id:
            raise OfferSpaceError(f"boardOptions[{i}]: missing boardId")
        boards.append(BoardOption(board_id, parse_money(b.get("surcharge", 0))))
    return OfferSpace(
        accommodation_id=acc,
        room_types=tuple(rooms),
        occupancy=(occ_min, occ_max),
        per_person_surcharge_cents=parse_money(obj.get("perPersonSurcharge", 0)),
        board_options=tuple(boards),
        stay_lengths=(stay_min, stay_max),
    )


def offer_space_to_dict(space: OfferSpace) -> dict:
    return {
        "accommodationId": space.accommodation_id,
        "roomTypes": [
            {
                "roomId": r.room_id,
                "rates": [
                    {
                        "from": iv.start.isoformat(),
                        "to": iv.end.isoformat(),
                        "nightlyRate": cents_str(iv.nightly_rate_cents),
                    }
                    for iv in r.rates
                ],
            }
            for r in space.room_types
        ],
        "occupancy": {"min": space.occupancy[0], "max": space.occupancy[1]},
        "perPersonSurcharge": cents_str(space.per_person_surcharge_cents),
        "boardOptions": [
            {"boardId": b.board_id, "surcharge": cents_str(b.surcharge_cents)}
            for b in space.board_options
        ],
        "stayLengths": {"min": space.stay_lengths[0], "max": space.stay_lengths[1]},
    }


# -- enumeration and pricing ----------------------------------------------------


def _clip_window(space: OfferSpace, window: tuple[date, date]) -> tuple[date, date]:
    v_start, v_end = space.validity
    return max(window[0], v_start), min(window[1], v_end)


def iter_combinations(
    space: OfferSpace, window: tuple[date, date]
) -> Iterator[tuple[str, date, int, int, str]]:
    """All (room, check-in, nights, persons, board) tuples whose full stay
    fits inside `window` (clipped to the validity window), in
    deterministic order."""
    start, end = _clip_window(space, window)
    if start >= end:
        return
    days = (end - start).days
    for room in space.room_types:
        for nights in range(space.stay_lengths[0], space.stay_lengths[1] + 1):
            for offset in range(days - nights + 1):
                check_in = start + timedelta(days=offset)
                for persons in range(space.occupancy[0], space.occupancy[1] + 1):
                    for board in space.board_options:
                        yield (room.room_id, check_in, nights, persons, board.board_id)


def combination_count(space: OfferSpace, window: tuple[date, date]) -> int:
    """Exact number of bookable combinations with the stay inside `window`."""
    start, end = _clip_window(space, window)
    if start >= end:
        return 0
    days = (end - start).days
    slots = sum(
        max(0, days - nights + 1)
        for nights in range(space.stay_lengths[0], space.stay_lengths[1] + 1)
    )
    persons = space.occupancy[1] - space.occupancy[0] + 1
    return len(space.room_types) * slots * persons * len(space.board_options)


def nightly_rate(room: RoomType, night: date) -> int:
    for iv in room.rates:
        if iv.start <= night < iv.end:
            return iv.nightly_rate_cents
    raise OfferBoundsError("stay", f"night {night.isoformat()} outside the validity window")


def price_offer(
    space: OfferSpace,
    room_id: str,
    check_in: date,
    nights: int,
    persons: int,
    board_id: str,
) -> ConcreteOffer:
    """Exact total: per-night room rates plus person and board surcharges."""
    room = space.room(room_id)
    board = space.board(board_id)
    if not (space.stay_lengths[0] <= nights <= space.stay_lengths[1]):
        raise OfferBoundsError(
            "nights", f"{nights} outside {space.stay_lengths[0]}..{space.stay_lengths[1]}"
        )
    if not (space.occupancy[0] <= persons <= space.occupancy[1]):
        raise OfferBoundsError(
            "persons", f"{persons} outside {space.occupancy[0]}..{space.occupancy[1]}"
        )
    room_component = sum(
        nightly_rate(room, check_in + timedelta(days=i)) for i in range(nights)
    )
    total = (
        room_component
        + space.per_person_surcharge_cents * max(0, persons - 1) * nights
        + board.surcharge_cents * persons * nights
    )
    return ConcreteOffer(
        accommodation_id=space.accommodation_id,
        room_id=room_id,
        check_in=check_in,
        nights=nights,
        persons=persons,
        board_id=board_id,
        total_cents=total,
    )


def _price_all(space: OfferSpace, window: tuple[date, date]) -> list[ConcreteOffer]:
    offers = [price_offer(space, *combo) for combo in iter_combinations(space, window)]
    offers.sort(key=ConcreteOffer.sort_key)
    return offers


def materialize_representatives(
    space: OfferSpace,
    window: tuple[date, date],
    k: int,
    strategy: str = "global-min-first",
) -> list[ConcreteOffer]:
    """At most `k` representative offers for publication, sorted by price.

    The global minimum-price offer is always included.  Remaining slots:
    `global-min-first` takes the next-cheapest offers overall,
    `per-room-min` the cheapest offer of each room, `per-month-min` the
    cheapest offer of each check-in month; leftovers fall back to the
    overall price order.  Ties break on (check-in, room, board).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    everything = _price_all(space, window)
    if not everything:
        return []
    if strategy == "global-min-first":
        chosen = everything[:k]
    else:
        if strategy == "per-room-min":
            group = lambda o: o.room_id
        else:
            group = lambda o: (o.check_in.year, o.check_in.month)
        minima: dict = {}
        for o in everything:  # already in price order; first of each group is its minimum
            minima.setdefault(group(o), o)
        chosen_set = set(list(minima.values())[:k])
        for o in everything:
            if len(chosen_set) >= k:
                break
            chosen_set.add(o)
        chosen = [o for o in everything if o in chosen_set]
    return chosen


# -- publication ---------------------------------------------------------------


def offers_to_annotations(
    offers: Iterable[ConcreteOffer],
    accommodation_id: str,
    provider_iri: str | None = None,
) -> list[dict]:
    """One schema.org Offer document per concrete offer.

    Carries the exact total price, the per-person-per-night unit price
    (the field the analytics layer reads), stay dates and occupancy.
    """
    docs = []
    for o in offers:
        doc = {
            "@context": vocab.SCHEMA,
            "@type": "Offer",
            "@id": o.offer_id,
            "name": f"{o.room_id}, {o.board_id}, {o.nights} nights, {o.persons} persons",
            "price": cents_str(o.total_cents),
            "priceCurrency": "EUR",
            "itemOffered": {"@id": accommodation_id},
            "validFrom": o.check_in.isoformat(),
            "validThrough": o.check_out.isoformat(),
            "sku": o.room_id,
            "priceSpecification": {
                "@type": "UnitPriceSpecification",
                "price": cents_str(o.price_per_person_per_night_cents),
                "priceCurrency": "EUR",
                "unitText": "person night",
            },
            "eligibleQuantity": {
                "@type": "QuantitativeValue",
                "value": o.persons,
                "unitText": "person",
            },
        }
        if provider_iri is not None:
            doc["seller"] = {"@id": provider_iri}
        docs.append(doc)
    return docs
