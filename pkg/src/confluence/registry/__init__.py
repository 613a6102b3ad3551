"""Component metadata registry and citation formatting.

Each bundled component ships a ``<class>.doc`` file next to this
module: a JSON object with authorship, versioning, a parameter schema
(used to drive client forms), and the component's port names.  The
citation formatter renders the recommended reference string for a
component from that metadata.
"""

import json
from dataclasses import dataclass, field
from importlib import resources

from ..standard_names import NameParseError, parse as parse_name

PARAMETER_KINDS = ("int", "real", "string", "choice")


class NotFoundError(KeyError):
    """No metadata is registered under the requested class name."""

    def __str__(self):
        return self.args[0]


class MetadataError(ValueError):
    """A metadata document is missing fields or inconsistent."""


@dataclass
class Author:
    family: str
    initials: str


@dataclass
class Parameter:
    key: str
    kind: str
    default: object = None
    range: list = None
    choices: list = None
    units: str = "1"
    description: str = ""

    def validate(self):
        if self.kind not in PARAMETER_KINDS:
            raise MetadataError(
                "parameter {!r} has unknown kind {!r}".format(self.key, self.kind)
            )
        if self.kind == "choice":
            if not self.choices:
                raise MetadataError(
                    "choice parameter {!r} needs choices".format(self.key)
                )
            if self.default not in self.choices:
                raise MetadataError(
                    "default of {!r} is not one of its choices".format(self.key)
                )
        if self.kind in ("int", "real") and self.range is not None:
            lo, hi = self.range
            if lo is not None and self.default < lo:
                raise MetadataError(
                    "default of {!r} is below its range".format(self.key)
                )
            if hi is not None and self.default > hi:
                raise MetadataError(
                    "default of {!r} is above its range".format(self.key)
                )


@dataclass
class ComponentMeta:
    class_name: str
    name: str
    version: str
    summary: str
    authors: list
    year: int
    license: str = ""
    identifier: str = None
    parameters: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    def as_dict(self):
        return {
            "class": self.class_name,
            "name": self.name,
            "version": self.version,
            "summary": self.summary,
            "authors": [
                {"family": a.family, "initials": a.initials} for a in self.authors
            ],
            "year": self.year,
            "license": self.license,
            "identifier": self.identifier,
            "parameters": [
                {
                    "key": p.key,
                    "kind": p.kind,
                    "default": p.default,
                    "range": p.range,
                    "choices": p.choices,
                    "units": p.units,
                    "description": p.description,
                }
                for p in self.parameters
            ],
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
        }


def meta_from_dict(doc):
    """Build and validate a ComponentMeta from a plain dict."""
    if not isinstance(doc, dict):
        raise MetadataError("metadata must be an object")
    try:
        class_name = doc["class"]
        name = doc["name"]
        version = str(doc["version"])
        year = int(doc["year"])
        raw_authors = doc["authors"]
    except (KeyError, TypeError, ValueError) as err:
        raise MetadataError("metadata is missing {}".format(err)) from err
    if not isinstance(raw_authors, list) or not raw_authors:
        raise MetadataError("metadata needs at least one author")
    authors = []
    for entry in raw_authors:
        try:
            authors.append(Author(entry["family"], entry["initials"]))
        except (KeyError, TypeError) as err:
            raise MetadataError("bad author entry {!r}".format(entry)) from err

    parameters = []
    for entry in doc.get("parameters", []):
        param = Parameter(
            key=entry["key"],
            kind=entry["kind"],
            default=entry.get("default"),
            range=entry.get("range"),
            choices=entry.get("choices"),
            units=entry.get("units", "1"),
            description=entry.get("description", ""),
        )
        param.validate()
        parameters.append(param)

    inputs = list(doc.get("inputs", []))
    outputs = list(doc.get("outputs", []))
    for label in inputs + outputs:
        try:
            parse_name(label)
        except NameParseError as err:
            raise MetadataError(
                "bad variable name {!r} in metadata: {}".format(label, err)
            ) from err

    return ComponentMeta(
        class_name=class_name,
        name=name,
        version=version,
        summary=doc.get("summary", ""),
        authors=authors,
        year=year,
        license=doc.get("license", ""),
        identifier=doc.get("identifier"),
        parameters=parameters,
        inputs=inputs,
        outputs=outputs,
    )


_cache = None


def load_registry():
    """Read all bundled metadata files, keyed and sorted by class name."""
    global _cache
    if _cache is None:
        metas = {}
        for entry in resources.files(__name__).iterdir():
            if entry.name.endswith(".doc"):
                meta = meta_from_dict(json.loads(entry.read_text()))
                metas[meta.class_name] = meta
        _cache = {key: metas[key] for key in sorted(metas)}
    return _cache


def list_components():
    return list(load_registry().values())


def describe(class_name):
    try:
        return load_registry()[class_name]
    except KeyError:
        raise NotFoundError(
            "no metadata for {!r}; registered: {}".format(
                class_name, ", ".join(load_registry())
            )
        ) from None


def format_citation(meta):
    """Render the recommended citation string for a component."""
    if isinstance(meta, dict):
        meta = meta_from_dict(meta)
    if not meta.authors:
        raise MetadataError("citation needs at least one author")
    authors = ", ".join(
        "{}, {}.".format(author.family, author.initials.rstrip("."))
        for author in meta.authors
    )
    head = "{} ({}). {}, {}.".format(authors, meta.year, meta.name, meta.version)
    if meta.identifier:
        return "{} {}.".format(head, meta.identifier)
    return head
