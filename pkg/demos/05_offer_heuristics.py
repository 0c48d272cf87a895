"""
Offer spaces and publication heuristics
=======================================

An accommodation's booking options explode combinatorially (rooms x
check-ins x stay lengths x occupancies x boards).  The offer space keeps
them parametric: exact prices are computed on demand, and a handful of
representative offers is materialized for publication.
"""
import json
from datetime import date
from pathlib import Path

from tourkg.offers import (
    combination_count,
    load_offer_space,
    materialize_representatives,
    offers_to_annotations,
    price_offer,
)

space = load_offer_space(
    (Path(__file__).parent.parent / "tests" / "fixtures" / "offers" / "alpenhof.json").read_text()
)
window = (date(2017, 12, 15), date(2018, 3, 1))
print(f"bookable combinations in {window[0]}..{window[1]}: {combination_count(space, window)}")

# exact pricing across a season boundary: two nights at 90, one at 140
offer = price_offer(space, "double", date(2017, 12, 20), 3, 2, "half-board")
print(
    f"\n3 nights, 2 persons, half board from 2017-12-20: "
    f"{offer.total_cents / 100:.2f} EUR "
    f"({offer.price_per_person_per_night_cents / 100:.2f} per person per night)"
)

# instead of ~20k offer documents, publish a few representatives
for strategy in ("global-min-first", "per-room-min", "per-month-min"):
    chosen = materialize_representatives(space, window, k=4, strategy=strategy)
    line = ", ".join(f"{o.room_id}@{o.total_cents / 100:.0f}" for o in chosen)
    print(f"{strategy:>16}: {line}")

print("\none published offer as schema.org annotation:")
docs = offers_to_annotations(
    materialize_representatives(space, window, k=1), space.accommodation_id
)
print(json.dumps(docs[0], indent=2))
