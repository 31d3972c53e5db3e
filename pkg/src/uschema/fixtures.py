"""The "User Profiles" running example in every paradigm, plus the Sakila DDL.

Users come in two variations: full profiles (surname, favorite movies, an
address with postcode) and short ones (no surname, no favorites, an address
without postcode). Every user has watched movies, each with a star rating.
"""

from __future__ import annotations

import random
from importlib import resources

from .adapters.ddl import parse_ddl
from .builders.relational import build_relational
from .model.types import (
    NUMBER,
    STRING,
    UNBOUNDED,
    Aggregate,
    Attribute,
    EntityType,
    Key,
    ListOf,
    Reference,
    RelationshipType,
    StructuralVariation,
    USchemaModel,
    VariationRef,
)

# 1/100 of the database sizes used for the scalability experiment
SCALE_FAMILY = {
    1: {"users": 1000, "movies": 500, "per_user": 3},
    2: {"users": 2000, "movies": 1000, "per_user": 5},
    4: {"users": 4000, "movies": 2000, "per_user": 10},
    8: {"users": 8000, "movies": 4000, "per_user": 20},
}

SMALL = SCALE_FAMILY[1]

RELATIONAL_DDL = """\
CREATE TABLE Movie (
  id INT NOT NULL,
  title VARCHAR(255),
  year INT,
  genre VARCHAR(255),
  PRIMARY KEY (id)
);

CREATE TABLE User (
  id INT NOT NULL,
  name VARCHAR(255),
  surname VARCHAR(255),
  email VARCHAR(255),
  street VARCHAR(255),
  number INT,
  city VARCHAR(255),
  postcode VARCHAR(255),
  PRIMARY KEY (id)
);

-- @relationship
CREATE TABLE WatchedMovies (
  user_id INT NOT NULL,
  movie_id INT NOT NULL,
  stars INT,
  PRIMARY KEY (user_id, movie_id),
  FOREIGN KEY (user_id) REFERENCES User (id),
  FOREIGN KEY (movie_id) REFERENCES Movie (id)
);

-- @relationship
CREATE TABLE FavoriteMovies (
  user_id INT NOT NULL,
  movie_id INT NOT NULL,
  PRIMARY KEY (user_id, movie_id),
  FOREIGN KEY (user_id) REFERENCES User (id),
  FOREIGN KEY (movie_id) REFERENCES Movie (id)
);
"""


def sakila_ddl() -> str:
    return resources.files("uschema").joinpath("data/sakila.sql").read_text(encoding="utf-8")


def _attrs(*names, type_=STRING):
    return [Attribute(n, type_) for n in names]


def _counts(users: int, movies: int, per_user: int) -> dict:
    full = users // 2
    return {"users": (full, users - full), "movies": movies, "watched": users * per_user,
            "favorites": full * per_user}


def aggregate_model(style: str = "document", users: int = SMALL["users"],
                    movies: int = SMALL["movies"], per_user: int = SMALL["per_user"]) -> USchemaModel:
    """Running example as inferred from a document, key-value or columnar store."""
    c = _counts(users, movies, per_user)
    full, short = c["users"]

    def root_key():
        if style == "document":
            return [Attribute("_id", NUMBER, is_key=True), Key("_id", ("_id",))]
        return [Key("_id", ())]

    movie = EntityType("Movie", (StructuralVariation(1, movies, tuple(
        root_key() + _attrs("title", "genre") + [Attribute("year", NUMBER)])),), root=True)
    user_full = root_key() + _attrs("name", "surname", "email") + [
        Attribute("favoriteMovies", ListOf(NUMBER)),
        Reference("favoriteMovies", "Movie", ("favoriteMovies",), 1, UNBOUNDED),
        Aggregate("address", (VariationRef("Address", 2),)),
        Aggregate("watchedMovies", (VariationRef("WatchedMovie", 1),), 1, UNBOUNDED),
    ]
    user_short = root_key() + _attrs("name", "email") + [
        Aggregate("address", (VariationRef("Address", 1),)),
        Aggregate("watchedMovies", (VariationRef("WatchedMovie", 1),), 1, UNBOUNDED),
    ]
    user = EntityType("User", (StructuralVariation(1, full, tuple(user_full)),
                               StructuralVariation(2, short, tuple(user_short))), root=True)
    address = EntityType("Address", (
        StructuralVariation(1, short, tuple(_attrs("street", "city") + [Attribute("number", NUMBER)])),
        StructuralVariation(2, full, tuple(_attrs("street", "city", "postcode")
                                           + [Attribute("number", NUMBER)])),
    ), root=False)
    watched = EntityType("WatchedMovie", (StructuralVariation(1, c["watched"], (
        Attribute("stars", NUMBER),
        Attribute("movie_id", NUMBER),
        Reference("movie_id", "Movie", ("movie_id",), 1, 1),
    )),), root=False)
    return USchemaModel("userprofiles", (user, movie, address, watched), (), paradigm=style)


def graph_model(users: int = SMALL["users"], movies: int = SMALL["movies"],
                per_user: int = SMALL["per_user"]) -> USchemaModel:
    """Running example as a property graph: addresses are nodes, relationships are edges."""
    c = _counts(users, movies, per_user)
    full, short = c["users"]

    def edge(name, dest, ub):
        return Reference(name, dest, (), 1, ub, featured_by=VariationRef(name, 1))

    user = EntityType("User", (
        StructuralVariation(1, full, tuple(_attrs("name", "surname", "email") + [
            edge("FAVORITE_MOVIES", "Movie", UNBOUNDED),
            edge("WATCHED_MOVIES", "Movie", UNBOUNDED),
            edge("ADDRESS", "Address", 1)])),
        StructuralVariation(2, short, tuple(_attrs("name", "email") + [
            edge("WATCHED_MOVIES", "Movie", UNBOUNDED),
            edge("ADDRESS", "Address", 1)])),
    ), root=True)
    movie = EntityType("Movie", (StructuralVariation(1, movies, tuple(
        _attrs("title", "genre") + [Attribute("year", NUMBER)])),), root=True)
    address = EntityType("Address", (
        StructuralVariation(1, short, tuple(_attrs("street", "city") + [Attribute("number", NUMBER)])),
        StructuralVariation(2, full, tuple(_attrs("street", "city", "postcode")
                                           + [Attribute("number", NUMBER)])),
    ), root=True)
    rels = (
        RelationshipType("FAVORITE_MOVIES", (StructuralVariation(1, c["favorites"], ()),)),
        RelationshipType("WATCHED_MOVIES", (StructuralVariation(1, c["watched"], (
            Attribute("stars", NUMBER),)),)),
        RelationshipType("ADDRESS", (StructuralVariation(1, users, ()),)),
    )
    return USchemaModel("userprofiles", (user, movie, address), rels, paradigm="graph")


def relational_model() -> USchemaModel:
    return build_relational(parse_ddl(RELATIONAL_DDL, "userprofiles.sql"), "userprofiles")


def running_example_model(paradigm: str, **sizes) -> USchemaModel:
    if paradigm in ("document", "keyvalue", "columnar"):
        return aggregate_model(paradigm, **sizes)
    if paradigm == "graph":
        return graph_model(**sizes)
    if paradigm == "relational":
        return relational_model()
    raise ValueError(f"unknown paradigm {paradigm!r}")


def logical_records(users: int = SMALL["users"], movies: int = SMALL["movies"],
                    per_user: int = SMALL["per_user"], seed: int = 0) -> list[tuple[str, dict]]:
    """The running example as plain records, independent of any store.

    Every user has exactly ``per_user`` watched movies; full-profile users
    (the first half) also have ``per_user`` favorites.
    """
    rng = random.Random(seed)
    out: list[tuple[str, dict]] = []
    genres = ["drama", "comedy", "horror", "scifi", "western"]
    for i in range(1, movies + 1):
        out.append(("Movie", {"_id": i, "title": f"Movie {i}", "genre": rng.choice(genres),
                              "year": rng.randint(1920, 2024)}))
    full = users // 2
    for i in range(1, users + 1):
        address = {"street": f"Street {rng.randint(1, 500)}", "number": rng.randint(1, 200),
                   "city": rng.choice(["Murcia", "Madrid", "Lyon", "Porto"])}
        user = {"_id": i, "name": f"name{i}"}
        if i <= full:
            user["surname"] = f"surname{i}"
            address["postcode"] = f"{rng.randint(10000, 99999)}"
        user["email"] = f"user{i}@example.org"
        user["address"] = address
        if i <= full:
            user["favoriteMovies"] = rng.sample(range(1, movies + 1), per_user)
        user["watchedMovies"] = [{"stars": rng.randint(1, 5), "movie_id": rng.randint(1, movies)}
                                 for _ in range(per_user)]
        out.append(("User", user))
    return out


def watched_relationship_model() -> USchemaModel:
    """Users whose watched movies are a relationship type carrying ``stars``."""
    user = EntityType("User", (StructuralVariation(1, 10, (
        Attribute("_id", NUMBER, is_key=True), Key("_id", ("_id",)),
        Attribute("name", STRING),
        Reference("watchedMovies", "Movie", (), 1, UNBOUNDED,
                  featured_by=VariationRef("WatchedMovie", 1)),
    )),), root=True)
    movie = EntityType("Movie", (StructuralVariation(1, 10, (
        Attribute("_id", NUMBER, is_key=True), Key("_id", ("_id",)),
        Attribute("title", STRING),
    )),), root=True)
    rel = RelationshipType("WatchedMovie", (StructuralVariation(1, 30, (
        Attribute("stars", NUMBER),)),))
    return USchemaModel("watched", (user, movie), (rel,))


def person_address_model() -> USchemaModel:
    """A Person entity that aggregates a single Address."""
    person = EntityType("Person", (StructuralVariation(1, 10, (
        Attribute("_id", NUMBER, is_key=True), Key("_id", ("_id",)),
        Attribute("name", STRING),
        Aggregate("address", (VariationRef("Address", 1),)),
    )),), root=True)
    address = EntityType("Address", (StructuralVariation(1, 10, tuple(
        _attrs("street", "city"))),), root=False)
    return USchemaModel("people", (person, address), ())


def scale_counts(factor: int) -> dict:
    """Counts override for the aggregate model at one scale factor."""
    s = SCALE_FAMILY[factor]
    c = _counts(s["users"], s["movies"], s["per_user"])
    full, short = c["users"]
    return {"User": [full, short], "Movie": [s["movies"]], "Address": [short, full],
            "WatchedMovie": [c["watched"]]}
