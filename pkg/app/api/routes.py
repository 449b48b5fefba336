from fastapi import APIRouter, HTTPException
from pydantic import ValidationError
from typing import Optional
import logging

from app.models.schemas import (
    CommandReport,
    ExtRequest,
    LocalCohomologyRequest,
    RationalRequest,
    SessionConfig,
    SubjectRequest,
    TorsionRequest,
)
from app.services import commands
from app.services.errors import (
    CertificateError,
    DescriptionError,
    ExpectationMismatch,
    HypothesisRefusal,
    NotRationalError,
    PrimeMismatchError,
    StructureError,
    WindowError,
)
from app.services.loaders import resolve

router = APIRouter()
logger = logging.getLogger(__name__)

INPUT_ERRORS = (DescriptionError, ValidationError, WindowError, PrimeMismatchError, StructureError, FileNotFoundError)
REFUSALS = (HypothesisRefusal, CertificateError, NotRationalError, ExpectationMismatch)


def _http_error(action: str, e: Exception) -> HTTPException:
    logger.error(f"Error {action}: {e}")
    if isinstance(e, INPUT_ERRORS):
        return HTTPException(status_code=422, detail=str(e))
    if isinstance(e, REFUSALS):
        return HTTPException(status_code=409, detail=str(e))
    return HTTPException(status_code=500, detail=str(e))


def _subject(request: SubjectRequest):
    return resolve(builtin=request.builtin, description=request.description)


@router.post("/describe", response_model=CommandReport)
def describe(request: SubjectRequest):
    """
    Dimensions, bounds and axiom checks of a builtin or an inline description.
    """
    try:
        return commands.cmd_describe(_subject(request), SessionConfig())
    except Exception as e:
        raise _http_error("describing subject", e)


@router.post("/h0", response_model=CommandReport)
def torsion_subgroup(request: TorsionRequest):
    try:
        return commands.cmd_h0(_subject(request), request.ideal_set, request.horizon, SessionConfig())
    except Exception as e:
        raise _http_error("computing h0", e)


@router.post("/H0", response_model=CommandReport)
def torsion_submodule(request: TorsionRequest):
    try:
        return commands.cmd_H0(_subject(request), request.ideal_set, request.horizon, SessionConfig())
    except Exception as e:
        raise _http_error("computing H0", e)


@router.post("/rational", response_model=CommandReport)
def rational(request: RationalRequest):
    try:
        return commands.cmd_rational(_subject(request), request.coalgebra, SessionConfig())
    except Exception as e:
        raise _http_error("testing rationality", e)


@router.post("/ext", response_model=CommandReport)
def ext_groups(request: ExtRequest):
    """
    Ext^(s,t)(source, target) for s <= max_s.
    """
    try:
        return commands.cmd_ext(_subject(request.source), _subject(request.target),
                                request.max_s, request.degrees, SessionConfig())
    except Exception as e:
        raise _http_error("computing Ext", e)


@router.post("/localcoh", response_model=CommandReport)
def local_cohomology(request: LocalCohomologyRequest):
    try:
        return commands.cmd_localcoh(_subject(request), request.n, request.j_max, request.degrees,
                                     request.ideal_set, SessionConfig())
    except Exception as e:
        raise _http_error("computing local cohomology", e)


@router.get("/examples/{name}", response_model=CommandReport)
def example(name: str, check: Optional[bool] = True):
    """
    Run a canned configuration; a mismatch with the stored outcome is a 409.
    """
    try:
        return commands.cmd_example(name, SessionConfig(), check=check)
    except Exception as e:
        raise _http_error(f"running example {name}", e)


@router.get("/steenrod/{n}", response_model=CommandReport)
def steenrod_basis(n: int):
    try:
        return commands.cmd_steenrod_table(n, SessionConfig())
    except Exception as e:
        raise _http_error(f"listing A({n})", e)
