"""Curated schema.org subset: tourism-relevant classes and properties.

Backs vocabulary-membership checks (domain specifications, mappings) and
the default class hierarchy used for inference.  schema.org lists
domain/range hints per property; only properties with a single
unambiguous domain (or single class-valued range) contribute
domain/range assertions to the inference hierarchy.
"""
from __future__ import annotations

from .rdf import ClassHierarchy

SCHEMA = "https://schema.org/"

# Accepted @context spellings; all resolve names against SCHEMA.
CONTEXT_FORMS = (
    "https://schema.org/",
    "https://schema.org",
    "http://schema.org/",
    "http://schema.org",
)

# class -> direct superclasses (multiple inheritance occurs, e.g. LocalBusiness)
CLASSES: dict[str, tuple[str, ...]] = {
    "Thing": (),
    # actions
    "Action": ("Thing",),
    "SearchAction": ("Action",),
    "TradeAction": ("Action",),
    "BuyAction": ("TradeAction",),
    "OrganizeAction": ("Action",),
    "PlanAction": ("OrganizeAction",),
    "ReserveAction": ("PlanAction",),
    # events
    "Event": ("Thing",),
    "SportsEvent": ("Event",),
    "Festival": ("Event",),
    # intangibles
    "Intangible": ("Thing",),
    "Audience": ("Intangible",),
    "EntryPoint": ("Intangible",),
    "Offer": ("Intangible",),
    "Rating": ("Intangible",),
    "AggregateRating": ("Rating",),
    "Reservation": ("Intangible",),
    "LodgingReservation": ("Reservation",),
    "Service": ("Intangible",),
    "Trip": ("Intangible",),
    "TouristTrip": ("Trip",),
    "StructuredValue": ("Intangible",),
    "ContactPoint": ("StructuredValue",),
    "PostalAddress": ("ContactPoint",),
    "GeoCoordinates": ("StructuredValue",),
    "OpeningHoursSpecification": ("StructuredValue",),
    "PriceSpecification": ("StructuredValue",),
    "UnitPriceSpecification": ("PriceSpecification",),
    "QuantitativeValue": ("StructuredValue",),
    "PropertyValueSpecification": ("Intangible",),
    # organizations and places
    "Organization": ("Thing",),
    "Person": ("Thing",),
    "Place": ("Thing",),
    "Accommodation": ("Place",),
    "Apartment": ("Accommodation",),
    "Room": ("Accommodation",),
    "HotelRoom": ("Room",),
    "Suite": ("Accommodation",),
    "AdministrativeArea": ("Place",),
    "City": ("AdministrativeArea",),
    "Country": ("AdministrativeArea",),
    "State": ("AdministrativeArea",),
    "Landform": ("Place",),
    "Mountain": ("Landform",),
    "TouristAttraction": ("Place",),
    "TouristDestination": ("Place",),
    "LocalBusiness": ("Organization", "Place"),
    "FoodEstablishment": ("LocalBusiness",),
    "Bakery": ("FoodEstablishment",),
    "BarOrPub": ("FoodEstablishment",),
    "CafeOrCoffeeShop": ("FoodEstablishment",),
    "Restaurant": ("FoodEstablishment",),
    "LodgingBusiness": ("LocalBusiness",),
    "BedAndBreakfast": ("LodgingBusiness",),
    "Campground": ("LodgingBusiness",),
    "Hostel": ("LodgingBusiness",),
    "Hotel": ("LodgingBusiness",),
    "Motel": ("LodgingBusiness",),
    "Resort": ("LodgingBusiness",),
    "SportsActivityLocation": ("LocalBusiness",),
    "SkiResort": ("Resort", "SportsActivityLocation"),
    "TouristInformationCenter": ("LocalBusiness",),
    "Product": ("Thing",),
}

# scalar datatypes usable as range names in domain specifications
DATATYPES = frozenset(
    {"Text", "URL", "Number", "Integer", "Float", "Boolean", "Date", "DateTime", "Time"}
)

# property -> (domainIncludes, rangeIncludes); datatype names allowed in ranges
PROPERTIES: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "additionalType": (("Thing",), ("URL",)),
    "address": (("Organization", "Person", "Place"), ("PostalAddress", "Text")),
    "addressCountry": (("PostalAddress", "GeoCoordinates"), ("Country", "Text")),
    "addressLocality": (("PostalAddress",), ("Text",)),
    "addressRegion": (("PostalAddress",), ("Text",)),
    "aggregateRating": (("Organization", "Place", "Offer", "Product"), ("AggregateRating",)),
    "alternateName": (("Thing",), ("Text",)),
    "amenityFeature": (("Accommodation", "LodgingBusiness", "Place"), ("Text",)),
    "audience": (("Event", "LodgingBusiness", "Product", "Service"), ("Audience",)),
    "availability": (("Offer",), ("Text",)),
    "availableLanguage": (("ContactPoint", "LodgingBusiness", "TouristAttraction"), ("Text",)),
    "bestRating": (("Rating",), ("Number", "Text")),
    "checkinTime": (("LodgingBusiness", "LodgingReservation"), ("DateTime", "Time")),
    "checkoutTime": (("LodgingBusiness", "LodgingReservation"), ("DateTime", "Time")),
    "containedInPlace": (("Place",), ("Place",)),
    "contentType": (("EntryPoint",), ("Text",)),
    "currenciesAccepted": (("LocalBusiness",), ("Text",)),
    "dayOfWeek": (("OpeningHoursSpecification",), ("Text",)),
    "defaultValue": (("PropertyValueSpecification",), ("Text",)),
    "description": (("Thing",), ("Text",)),
    "duration": (("Event", "Trip"), ("Text",)),
    "elevation": (("GeoCoordinates", "Mountain"), ("Number", "Text")),
    "eligibleQuantity": (("Offer",), ("QuantitativeValue",)),
    "eligibleRegion": (("Offer",), ("Place", "Text")),
    "email": (("ContactPoint", "Organization", "Person"), ("Text",)),
    "endDate": (("Event",), ("Date", "DateTime")),
    "event": (("Organization", "Place"), ("Event",)),
    "faxNumber": (("ContactPoint", "Organization", "Person", "Place"), ("Text",)),
    "foundingDate": (("Organization",), ("Date",)),
    "geo": (("Place",), ("GeoCoordinates",)),
    "hasMap": (("Place",), ("URL",)),
    "httpMethod": (("EntryPoint",), ("Text",)),
    "identifier": (("Thing",), ("Text", "URL")),
    "image": (("Thing",), ("URL",)),
    "itemOffered": (
        ("Offer",),
        ("Accommodation", "Event", "Place", "Product", "Service", "Trip"),
    ),
    "latitude": (("GeoCoordinates",), ("Number", "Text")),
    "legalName": (("Organization",), ("Text",)),
    "location": (("Event", "Organization"), ("Place", "PostalAddress", "Text")),
    "logo": (("Organization", "Place", "Product"), ("URL",)),
    "longitude": (("GeoCoordinates",), ("Number", "Text")),
    "makesOffer": (("Organization", "Person"), ("Offer",)),
    "maximumAttendeeCapacity": (("Event", "Place"), ("Integer",)),
    "maxValue": (("QuantitativeValue", "PropertyValueSpecification"), ("Number",)),
    "minValue": (("QuantitativeValue", "PropertyValueSpecification"), ("Number",)),
    "name": (("Thing",), ("Text",)),
    "numberOfRooms": (("Accommodation", "LodgingBusiness", "Suite"), ("Number", "QuantitativeValue")),
    "object": (("Action",), ("Thing",)),
    "occupancy": (("Accommodation", "HotelRoom", "Suite"), ("QuantitativeValue",)),
    "offers": (("Event", "Place", "Product", "Service", "Trip"), ("Offer",)),
    "openingHours": (("LocalBusiness",), ("Text",)),
    "openingHoursSpecification": (("Place",), ("OpeningHoursSpecification",)),
    "organizer": (("Event",), ("Organization", "Person")),
    "paymentAccepted": (("LocalBusiness",), ("Text",)),
    "performer": (("Event",), ("Organization", "Person")),
    "petsAllowed": (("Accommodation", "LodgingBusiness"), ("Boolean", "Text")),
    "photo": (("Place", "Person"), ("URL",)),
    "postalCode": (("PostalAddress", "GeoCoordinates"), ("Text",)),
    "potentialAction": (("Thing",), ("Action",)),
    "price": (("Offer", "PriceSpecification", "TradeAction"), ("Number", "Text")),
    "priceCurrency": (("Offer", "PriceSpecification", "Reservation"), ("Text",)),
    "priceRange": (("LocalBusiness",), ("Text",)),
    "priceSpecification": (("Offer", "TradeAction"), ("PriceSpecification",)),
    "provider": (("Action", "Service", "Trip"), ("Organization", "Person")),
    "ratingValue": (("Rating",), ("Number", "Text")),
    "result": (("Action",), ("Thing",)),
    "sameAs": (("Thing",), ("URL",)),
    "seller": (("Offer", "BuyAction"), ("Organization", "Person")),
    "servesCuisine": (("FoodEstablishment",), ("Text",)),
    "sku": (("Offer", "Product"), ("Text",)),
    "smokingAllowed": (("Place",), ("Boolean",)),
    "starRating": (("LodgingBusiness",), ("Rating",)),
    "startDate": (("Event",), ("Date", "DateTime")),
    "streetAddress": (("PostalAddress",), ("Text",)),
    "target": (("Action",), ("EntryPoint", "URL")),
    "telephone": (("ContactPoint", "Organization", "Person", "Place"), ("Text",)),
    "touristType": (("TouristAttraction", "TouristDestination", "TouristTrip"), ("Audience", "Text")),
    "unitCode": (("QuantitativeValue", "UnitPriceSpecification"), ("Text", "URL")),
    "unitText": (("QuantitativeValue", "UnitPriceSpecification"), ("Text",)),
    "url": (("Thing",), ("URL",)),
    "validFrom": (("Offer", "OpeningHoursSpecification", "PriceSpecification"), ("Date", "DateTime")),
    "validThrough": (("Offer", "OpeningHoursSpecification", "PriceSpecification"), ("Date", "DateTime")),
    "value": (("QuantitativeValue",), ("Number", "Text", "Boolean")),
    "valueName": (("PropertyValueSpecification",), ("Text",)),
    "valueRequired": (("PropertyValueSpecification",), ("Boolean",)),
    "worstRating": (("Rating",), ("Number", "Text")),
}


def is_class(name: str) -> bool:
    return name in CLASSES


def is_property(name: str) -> bool:
    return name in PROPERTIES


def is_datatype(name: str) -> bool:
    return name in DATATYPES


def class_iri(name: str) -> str:
    return SCHEMA + name


def property_iri(name: str) -> str:
    return SCHEMA + name


def local_name(iri_value: str) -> str | None:
    """Local schema.org name of an IRI, or None for foreign IRIs."""
    if iri_value.startswith(SCHEMA):
        return iri_value[len(SCHEMA) :]
    if iri_value.startswith("http://schema.org/"):
        return iri_value[len("http://schema.org/") :]
    return None


_DEFAULT_HIERARCHY: ClassHierarchy | None = None


def default_hierarchy() -> ClassHierarchy:
    """Hierarchy over the bundled vocabulary, suitable for rdfs_closure.

    Domain assertions are added only for properties with exactly one
    declared domain; range assertions only for properties whose range
    names exactly one class (datatype ranges never contribute).
    Returns a shared instance; do not mutate it.
    """
    global _DEFAULT_HIERARCHY
    if _DEFAULT_HIERARCHY is not None:
        return _DEFAULT_HIERARCHY
    subclass_of = {
        (class_iri(c), class_iri(sup)) for c, supers in CLASSES.items() for sup in supers
    }
    domains: set[tuple[str, str]] = set()
    ranges: set[tuple[str, str]] = set()
    for prop, (doms, rngs) in PROPERTIES.items():
        if len(doms) == 1:
            domains.add((property_iri(prop), class_iri(doms[0])))
        class_ranges = [r for r in rngs if r in CLASSES]
        if len(class_ranges) == 1 and len(rngs) == len(class_ranges):
            ranges.add((property_iri(prop), class_iri(class_ranges[0])))
    _DEFAULT_HIERARCHY = ClassHierarchy(
        subclass_of=subclass_of, subproperty_of=set(), domains=domains, ranges=ranges
    )
    return _DEFAULT_HIERARCHY


def subclasses_or_self(name: str) -> set[str]:
    """All vocabulary class names equal to or below `name`."""
    hierarchy = default_hierarchy()
    target = class_iri(name)
    out = {name}
    for cls in CLASSES:
        if hierarchy.is_subclass(class_iri(cls), target):
            out.add(cls)
    return out
