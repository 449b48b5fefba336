"""
Loading of description files (module, comodule, family, tower) and of
builtin names into the engine's objects.
"""

import json
import logging
import os
from typing import Any, Dict, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from app.models.schemas import (
    ComoduleDescription,
    FamilyDescription,
    FormulaModel,
    ModuleDescription,
    TailModel,
    TowerDescription,
)
from app.services import builtins
from app.services.errors import DescriptionError, StructureError
from app.services.graded import (
    ComoduleMap,
    DegreeWindow,
    GradedComodule,
    GradedModule,
    from_generator_action,
    iota,
)
from app.services.towers import ComoduleFamily, IndexFormula, TailDescriptor, Tower

logger = logging.getLogger(__name__)

Loaded = Union[GradedModule, GradedComodule, ComoduleFamily, Tower]

_KINDS = {
    "module": ModuleDescription,
    "comodule": ComoduleDescription,
    "family": FamilyDescription,
    "tower": TowerDescription,
}


def _field_path(loc) -> str:
    return ".".join(str(part) for part in loc)


def validate(model: type, data: Dict[str, Any]) -> BaseModel:
    """Validate `data` against a description model; errors carry the first offending field path."""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        path = _field_path(first["loc"]) or model.__name__
        raise DescriptionError(first["msg"], path) from e


def read_json(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"description file not found: {path}")
    with open(path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise DescriptionError(f"{path} is not valid JSON (line {e.lineno}, column {e.colno}): {e.msg}") from e
    if not isinstance(data, dict):
        raise DescriptionError(f"{path}: the top level must be an object")
    return data


def _labels(basis: Dict[int, list]) -> Dict[int, list]:
    return {int(t): list(names) for t, names in basis.items()}


def _window(desc) -> DegreeWindow:
    return DegreeWindow(desc.window.lo, desc.window.hi)


def build_module(desc: ModuleDescription) -> GradedModule:
    if desc.prime != 2:
        raise DescriptionError(f"prime {desc.prime} is not supported", "prime")
    algebra = builtins.algebra(desc.algebra)
    labels = _labels(desc.basis)
    generators = set(algebra.generators)
    action = {}
    for k, entry in enumerate(desc.actions):
        try:
            g_deg, g_idx = algebra.index_of(entry.generator)
        except KeyError:
            raise DescriptionError(f"{entry.generator!r} is not a basis element of {algebra.name}",
                                   f"actions.{k}.generator")
        if (g_deg, g_idx) not in generators:
            raise DescriptionError(f"{entry.generator} is not an algebra generator of {algebra.name}",
                                   f"actions.{k}.generator")
        src = len(labels.get(entry.source, []))
        tgt = len(labels.get(entry.source + g_deg, []))
        matrix = np.asarray(entry.matrix, dtype=np.int64)
        if matrix.size != src * tgt:
            raise DescriptionError(f"{entry.generator} from degree {entry.source} needs a {tgt}x{src} matrix",
                                   f"actions.{k}.matrix")
        action[(g_deg, g_idx, entry.source)] = matrix.reshape(tgt, src)
    m = from_generator_action(algebra, _window(desc), labels, action,
                              desc.bounded_below_at, desc.bounded_above_at, name=desc.name)
    failures = m.check_axioms()
    if failures:
        e, f, t = failures[0]
        raise StructureError(f"{desc.name}: (ab)x != a(bx) for degrees {e}, {f} on M^{t}")
    logger.info(f"Loaded module {m.name} over {algebra.name}: dims {m.dims()}")
    return m


def build_comodule(desc: ComoduleDescription) -> GradedComodule:
    if desc.prime != 2:
        raise DescriptionError(f"prime {desc.prime} is not supported", "prime")
    coalgebra = builtins.coalgebra(desc.coalgebra)
    coaction = {(c.degree, c.s): np.asarray(c.tensor, dtype=np.int64) for c in desc.coaction}
    m = GradedComodule(coalgebra, _window(desc), _labels(desc.basis), coaction,
                       desc.bounded_above_at, desc.bounded_below_at, name=desc.name)
    failures = m.check_axioms()
    if failures:
        raise StructureError(f"{desc.name}: coaction is not coassociative at (t, s1, s2) = {failures[0]}")
    logger.info(f"Loaded comodule {m.name} over {coalgebra.name}: dims {m.dims()}")
    return m


def _formula(model: FormulaModel) -> IndexFormula:
    return IndexFormula(model.kind, model.coefficient, model.offset, model.base)


def _tail(model: TailModel) -> TailDescriptor:
    return TailDescriptor(model.kind,
                          shift=_formula(model.shift) if model.shift else None,
                          cut=_formula(model.cut) if model.cut else None)


def build_family(desc: FamilyDescription) -> ComoduleFamily:
    if desc.builtin is not None:
        return builtins.family(desc.builtin, desc.horizon)
    members = [build_comodule(m) for m in desc.members]
    coalgebra = members[0].coalgebra
    for k, m in enumerate(members):
        if m.coalgebra.key != coalgebra.key:
            raise DescriptionError(f"member {k} is over {m.coalgebra.name}, not {coalgebra.name}", f"members.{k}")
    family = ComoduleFamily(coalgebra, members=members, name=desc.name)
    if desc.tail is not None:
        family.tail = _tail(desc.tail)
    return family


def build_tower(desc: TowerDescription) -> Tower:
    if desc.builtin is not None:
        return builtins.tower(desc.builtin, desc.horizon)
    members = [build_comodule(m) for m in desc.members]
    maps = []
    for i, degree_maps in enumerate(desc.maps):
        matrices = {entry.degree: np.asarray(entry.matrix, dtype=np.int64) for entry in degree_maps}
        maps.append(ComoduleMap(members[i + 1], members[i], matrices, name=f"f{i}"))
    tower = Tower(members, maps, name=desc.name)
    bad = tower.check_maps()
    if bad:
        raise StructureError(f"{desc.name}: map {bad[0]} does not commute with the coactions")
    return tower


def load_description(data: Dict[str, Any]) -> Loaded:
    """Dispatch on the `kind` field (module by default)."""
    kind = data.get("kind", "module")
    if kind not in _KINDS:
        raise DescriptionError(f"unknown kind {kind!r}; expected one of {sorted(_KINDS)}", "kind")
    desc = validate(_KINDS[kind], data)
    if kind == "module":
        return build_module(desc)
    if kind == "comodule":
        return build_comodule(desc)
    if kind == "family":
        return build_family(desc)
    return build_tower(desc)


def load_file(path: str) -> Loaded:
    logger.info(f"Reading description {path}")
    return load_description(read_json(path))


def resolve(builtin: str = None, path: str = None, description: Dict[str, Any] = None) -> Loaded:
    """
    A subject named by exactly one of: a builtin name, a file path, an inline description.

    Builtin names are looked up as families, then towers, then modules.
    """
    given = [x is not None for x in (builtin, path, description)]
    if sum(given) != 1:
        raise DescriptionError("give exactly one of a builtin name, a file or a description")
    if path is not None:
        return load_file(path)
    if description is not None:
        return load_description(description)
    builtin = builtins.canonical(builtin)
    if builtin in builtins.FAMILY_NAMES:
        return builtins.family(builtin)
    if builtin in builtins.TOWER_NAMES:
        return builtins.tower(builtin)
    return builtins.module(builtin)


def as_module(subject: Loaded) -> GradedModule:
    """Modules pass through; comodules are viewed through iota."""
    if isinstance(subject, GradedModule):
        return subject
    if isinstance(subject, GradedComodule):
        return iota(subject)
    raise DescriptionError(f"expected a module or comodule, got {type(subject).__name__}")
