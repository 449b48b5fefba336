"""
Named algebras, coalgebras, modules, ideal sets, families and towers.

Names either stand alone (``a1``, ``a1-self``, ``kx-family``) or carry a
trailing degree bound (``steenrod-16``, ``kx-44``, ``dual-steenrod-12``).
"""

import logging
import re
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import config
from app.services import steenrod
from app.services.errors import DescriptionError, WindowError
from app.services.graded import (
    GradedAlgebra,
    GradedCoalgebra,
    GradedComodule,
    GradedModule,
    algebra_as_module,
    coalgebra_as_comodule,
    comodule_conn,
    polynomial_algebra,
    submodule_generated,
    suspend_comodule,
    trivial_comodule,
    trivial_module,
)
from app.services.idealsets import IdealSet, gamma_module, ideal_generated
from app.services.steenrod import MilnorElement, element_vector
from app.services.towers import (
    ComoduleFamily,
    IndexFormula,
    TailDescriptor,
    Tower,
    constant_tower,
    module_truncation_tower,
    shift_tower,
    truncation_tower,
    zero_map_tower,
)

logger = logging.getLogger(__name__)

_BOUNDED = re.compile(r"^(?P<base>[a-z][a-z0-9-]*?)-(?P<top>\d+)$")

DEFAULT_STEENROD_TOP = 12
DEFAULT_KX_TOP = 44
KX_FAMILY_HORIZON = 20
XI_FAMILY_HORIZON = 4
XI_FAMILY_TOP = 16

# Alternative names for builtins, resolved before any lookup
ALIASES = {
    "a1-section3-example": "a1-sq1",
    "a1-section3-sub": "a1-sq2sq1",
    "ex1-family": "kx-family",
    "ex2-family": "xi-family",
}


def canonical(name: str) -> str:
    return ALIASES.get(name, name)


def _split(name: str, default_top: Optional[int] = None) -> Tuple[str, Optional[int]]:
    match = _BOUNDED.match(name)
    if match:
        return match.group("base"), int(match.group("top"))
    return name, default_top


# ---------------------------------------------------------------------------
# algebras and coalgebras
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def algebra(name: str) -> GradedAlgebra:
    """a0, a1, a2, steenrod-<top>, kx-<top> (|x| = 2), kxy-<top> (|x| = |y| = 1)."""
    if re.fullmatch(r"a\d", name):
        steenrod.build_dual_A_n(int(name[1]))
        return steenrod.build_A_n(int(name[1]))
    base, top = _split(name)
    if top is None:
        raise DescriptionError(f"unknown algebra {name!r}", "algebra")
    if base == "steenrod":
        # the xi-labelled dual must be the one cached on the algebra
        steenrod.build_dual_steenrod(top)
        return steenrod.build_truncated_A(top)
    if base == "kx":
        return polynomial_algebra(config.PRIME, {"x": 2}, top, name=f"k[x]<={top}")
    if base == "kxy":
        return polynomial_algebra(config.PRIME, {"x": 1, "y": 1}, top, name=f"k[x,y]<={top}")
    raise DescriptionError(f"unknown algebra {name!r}", "algebra")


@lru_cache(maxsize=None)
def coalgebra(name: str) -> GradedCoalgebra:
    """dual-<algebra name>; Steenrod-type duals carry xi-monomial labels."""
    if not name.startswith("dual-"):
        raise DescriptionError(f"coalgebra names start with 'dual-', got {name!r}", "coalgebra")
    inner = name[len("dual-"):]
    if re.fullmatch(r"a\d", inner):
        return steenrod.build_dual_A_n(int(inner[1]))
    base, top = _split(inner)
    if base == "steenrod" and top is not None:
        return steenrod.build_dual_steenrod(top)
    return algebra(inner).dual()


# ---------------------------------------------------------------------------
# modules
# ---------------------------------------------------------------------------

def _a1_sq1() -> GradedModule:
    a1 = algebra("a1")
    ambient = algebra_as_module(a1, name="A(1)")
    return submodule_generated(ambient, [element_vector(a1, MilnorElement.sq(1))], name="A(1)Sq(1)")


def _a1_sq2sq1() -> GradedModule:
    a1 = algebra("a1")
    ambient = algebra_as_module(a1, name="A(1)")
    sq2sq1 = MilnorElement.sq(2) * MilnorElement.sq(1)
    return submodule_generated(ambient, [element_vector(a1, sq2sq1)], name="A(1)Sq(2)Sq(1)")


_MODULES: Dict[str, Callable[[], GradedModule]] = {
    "a0-self": lambda: algebra_as_module(algebra("a0"), name="A(0)"),
    "a1-self": lambda: algebra_as_module(algebra("a1"), name="A(1)"),
    "a2-self": lambda: algebra_as_module(algebra("a2"), name="A(2)"),
    "k-a0": lambda: trivial_module(algebra("a0")),
    "k-a1": lambda: trivial_module(algebra("a1")),
    "a1-sq1": _a1_sq1,
    "a1-sq2sq1": _a1_sq2sq1,
}


def module(name: str) -> GradedModule:
    """
    A named module.

    Fixed names are listed in module_names(); bounded names are
    steenrod-self-<top>, dual-steenrod-<top>, dual-kx-<top> and k-steenrod-<top>.
    """
    name = canonical(name)
    if name in _MODULES:
        return _MODULES[name]()
    if name in ("steenrod-self", "dual-steenrod"):
        return module(f"{name}-{DEFAULT_STEENROD_TOP}")
    base, top = _split(name)
    if base == "steenrod-self":
        return algebra_as_module(algebra(f"steenrod-{top}"), name=f"A[<={top}]")
    if base == "dual-steenrod":
        return steenrod.dual_steenrod_module(top)
    if base == "dual-kx":
        return gamma_module(coalgebra(f"dual-kx-{top}"))
    if base == "k-steenrod":
        return trivial_module(algebra(f"steenrod-{top}"))
    raise DescriptionError(f"unknown module {name!r}", "module")


def module_names() -> List[str]:
    return sorted(_MODULES) + ["steenrod-self[-<top>]", "dual-steenrod[-<top>]", "dual-kx-<top>", "k-steenrod-<top>"]


# ---------------------------------------------------------------------------
# ideal sets
# ---------------------------------------------------------------------------

def mitchell_set(top: int) -> IdealSet:
    """{ann(omega_n)} for every n whose orientation class fits below `top`."""
    members = []
    for n in range(0, config.MAX_STEENROD_N + 1):
        if -steenrod.omega(n).degree > top:
            break
        members.append(steenrod.mitchell_ideal(n, top))
    return IdealSet.explicit(algebra(f"steenrod-{top}"), members, name="Mit")


def ideal_set(spec: str, on: GradedAlgebra, horizon: Optional[int] = None) -> IdealSet:
    """
    Parse an ideal-set name against an algebra.

    Args:
        spec: grad, trivial, dist, mitchell, or gen:<label>[;<label>...] for
            the single ideal generated by the listed basis elements
        on: algebra the ideals live in
        horizon: grad horizon

    Returns:
        IdealSet over `on`
    """
    if spec == "grad":
        return IdealSet.grad(on, horizon=horizon)
    if spec == "trivial":
        return IdealSet.trivial(on)
    if spec == "dist":
        return IdealSet.dist(gamma_module(on.dual()))
    if spec == "mitchell":
        if not on.name.startswith("A[<="):
            raise DescriptionError(f"the Mitchell set is built over the truncated Steenrod algebra, not {on.name}", "ideal_set")
        return mitchell_set(on.top)
    if spec.startswith("gen:"):
        labels = [label.strip() for label in spec[len("gen:"):].split(";") if label.strip()]
        try:
            elements = [on.element(label) for label in labels]
        except (KeyError, ValueError) as e:
            raise DescriptionError(f"unknown generator in {spec!r}: {e}", "ideal_set")
        return IdealSet.explicit(on, [ideal_generated(on, elements, name=f"({', '.join(labels)})")], name=spec)
    raise DescriptionError(f"unknown ideal set {spec!r}", "ideal_set")


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def _shifted_truncation(gamma: GradedComodule, shift: int, cut: int) -> GradedComodule:
    """Sigma^shift Gamma^(>= -cut)."""
    if cut > gamma.coalgebra.depth:
        raise WindowError(f"{gamma.coalgebra.name} is recorded down to {-gamma.coalgebra.depth}, member needs {-cut}")
    return suspend_comodule(comodule_conn(gamma, -cut), shift)


def kx_family(horizon: Optional[int] = None, top: int = DEFAULT_KX_TOP) -> ComoduleFamily:
    """Over the dual of k[x], |x| = 2: M_i = Sigma^(2i) Gamma^(>= -2i), so iota(M_i) = k[x]/x^(i+1)."""
    horizon = horizon if horizon is not None else KX_FAMILY_HORIZON
    gamma = coalgebra_as_comodule(coalgebra(f"dual-kx-{top}"), name="Gamma")
    tail = TailDescriptor(TailDescriptor.SHIFTED_TRUNCATION,
                          shift=IndexFormula(IndexFormula.AFFINE, 2, 0), cut=IndexFormula(IndexFormula.AFFINE, 2, 0))
    return ComoduleFamily(gamma.coalgebra, generator=lambda i: _shifted_truncation(gamma, 2 * i, 2 * i),
                          horizon=horizon, tail=tail, start=0, name="kx")


def xi_family(horizon: Optional[int] = None, top: int = XI_FAMILY_TOP) -> ComoduleFamily:
    """Over the dual Steenrod algebra: M_i = Sigma^c Gamma^(>= -c) with c = 2^i - 2, so xi_i sits in degree -1."""
    horizon = horizon if horizon is not None else XI_FAMILY_HORIZON
    gamma = coalgebra_as_comodule(coalgebra(f"dual-steenrod-{top}"), name="Gamma")
    formula = IndexFormula(IndexFormula.EXPONENTIAL, 1, -2)
    tail = TailDescriptor(TailDescriptor.SHIFTED_TRUNCATION, shift=formula, cut=formula)
    return ComoduleFamily(gamma.coalgebra, generator=lambda i: _shifted_truncation(gamma, formula(i), formula(i)),
                          horizon=horizon, tail=tail, start=1, name="xi")


def a1_family() -> ComoduleFamily:
    """A finite family over the dual of A(1): the coalgebra, the trivial comodule and a truncation."""
    c = coalgebra("dual-a1")
    gamma = coalgebra_as_comodule(c, name="Gamma")
    members = [gamma, trivial_comodule(c), comodule_conn(gamma, -3)]
    return ComoduleFamily(c, members=members, name="a1-finite")


def family(name: str, horizon: Optional[int] = None) -> ComoduleFamily:
    name = canonical(name)
    if name == "kx-family":
        return kx_family(horizon)
    if name == "xi-family":
        return xi_family(horizon)
    if name == "a1-family":
        return a1_family()
    raise DescriptionError(f"unknown family {name!r}", "family")


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

def gamma_truncation_tower(horizon: Optional[int] = None, cut: int = 4, top: int = DEFAULT_STEENROD_TOP) -> Tower:
    """Quotient truncations of Gamma^(>= -cut) over the dual Steenrod algebra; the limit is the whole comodule."""
    gamma = coalgebra_as_comodule(coalgebra(f"dual-steenrod-{top}"), name="Gamma")
    return truncation_tower(comodule_conn(gamma, -cut), horizon)


def steenrod_self_tower(horizon: Optional[int] = None, top: int = DEFAULT_STEENROD_TOP) -> Tower:
    """comod_i of the Steenrod algebra acting on itself: rational members, a non-rational limit."""
    horizon = horizon if horizon is not None else top
    a = algebra(f"steenrod-{top}")
    return module_truncation_tower(algebra_as_module(a, name="A"), coalgebra(f"dual-steenrod-{top}"), horizon)


def tower(name: str, horizon: Optional[int] = None) -> Tower:
    name = canonical(name)
    if name == "gamma-truncation":
        return gamma_truncation_tower(horizon)
    if name == "steenrod-self-truncation":
        return steenrod_self_tower(horizon)
    if name == "a1-truncation":
        return truncation_tower(coalgebra_as_comodule(coalgebra("dual-a1"), name="Gamma"), horizon)
    if name == "constant-k":
        return constant_tower(trivial_comodule(coalgebra("dual-a1")), horizon)
    if name == "constant-gamma":
        return constant_tower(coalgebra_as_comodule(coalgebra("dual-a1"), name="Gamma"), horizon)
    if name == "zero-maps":
        return zero_map_tower(coalgebra("dual-a1"), horizon)
    if name == "shift":
        return shift_tower(coalgebra("dual-a1"), horizon)
    raise DescriptionError(f"unknown tower {name!r}", "tower")


TOWER_NAMES = ["gamma-truncation", "steenrod-self-truncation", "a1-truncation", "constant-k",
               "constant-gamma", "zero-maps", "shift"]
FAMILY_NAMES = ["kx-family", "xi-family", "a1-family"]
