"""
lssreduce API
HTTP surface for Markov parameters, model reduction and verification
"""

from typing import List, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from lssreduce import __version__
from lssreduce.config import get_settings
from lssreduce.errors import InvalidInputError, LssError, RankConditionError, SizeLimitError
from lssreduce.model import Lss, ensure_valid, format_word, markov_parameters_up_to, parse_word
from lssreduce.moment import check_partial_realization, reduce as reduce_n
from lssreduce.nice import check_selection, match_sequence, reduce_alpha, reduce_alphabeta, reduce_beta, sequence_languages
from lssreduce.selection import PRESETS, NiceColumnSelection, check_against, selection_from_dict, validate_nice
from lssreduce.subspaces import is_minimal, is_observable, is_span_reachable

app = FastAPI(
    title="lssreduce API",
    description="Moment-matching model reduction for linear switched systems",
    version=__version__,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


class ModeMatrices(BaseModel):
    A: List[List[float]]
    B: List[List[float]]
    C: List[List[float]]


class ModelPayload(BaseModel):
    p: int
    m: int
    n: int
    D: int
    modes: List[ModeMatrices]
    x0: List[float]

    def to_lss(self) -> Lss:
        return ensure_valid(Lss.from_dict(self.model_dump()))


class MarkovRequest(BaseModel):
    model: ModelPayload
    N: int = Field(1, ge=0, description="Largest word length")


class ReduceRequest(BaseModel):
    model: ModelPayload
    method: str = Field("n-match", description="n-match, nice or sequence")
    N: Optional[int] = Field(None, ge=0)
    mode: str = "R"
    selection: Optional[dict] = None
    row_selection: Optional[dict] = None
    preset: Optional[str] = None
    upsilon: Optional[str] = None
    side: str = "column"


class VerifyRequest(BaseModel):
    model: ModelPayload
    reduced: Optional[ModelPayload] = None
    N: int = Field(1, ge=0)


def _http_error(e: Exception) -> HTTPException:
    if isinstance(e, RankConditionError):
        return HTTPException(status_code=409, detail={"message": str(e), "ranks": list(e.ranks)})
    if isinstance(e, SizeLimitError):
        return HTTPException(status_code=413, detail=str(e))
    if isinstance(e, (InvalidInputError, ValueError)):
        return HTTPException(status_code=400, detail=str(e))
    return HTTPException(status_code=500, detail=f"Error during reduction: {str(e)}")


@app.get("/")
async def root():
    """
    Root endpoint that returns a simple status message.
    """
    return {
        "message": "lssreduce API is running",
        "description": "Moment-matching model reduction for linear switched systems",
        "version": __version__,
    }


@app.get("/health")
async def health():
    """
    Health check endpoint for monitoring.
    """
    return {"status": "healthy", "service": "lssreduce"}


@app.post("/markov")
def markov(request: MarkovRequest):
    """
    Markov parameters C~ A_v B~ for every word of length <= N.

    Returns:
        JSON object mapping each word (digit string, "" for the empty word) to its matrix
    """
    settings = get_settings()
    try:
        params = markov_parameters_up_to(request.model.to_lss(), request.N, settings.max_words)
    except (LssError, ValueError) as e:
        raise _http_error(e)
    return {
        "N": request.N,
        "count": len(params),
        "parameters": {format_word(w, empty=""): p.value.tolist() for w, p in params.items()},
    }


@app.post("/reduce")
def reduce(request: ReduceRequest):
    """
    Reduce a system.

    Methods:
        n-match: N or 2N moment matching (mode R, O or T)
        nice: reduction by a nice selection, a preset, or a row/column pair
        sequence: exact output matching along a mode sequence upsilon

    Returns:
        JSON object with the reduced model, the ranks and the largest matched error

    Example:
        POST /reduce {"model": {...}, "method": "n-match", "N": 1, "mode": "T"}
    """
    settings = get_settings()
    tol = settings.rank_tol
    limit = settings.max_words
    try:
        sys = request.model.to_lss()
        if request.method == "n-match":
            if request.N is None:
                raise InvalidInputError("n-match needs N")
            report = reduce_n(sys, request.N, request.mode, tol)
            check = lambda: check_partial_realization(sys, report.reduced, report.matched_depth, limit)
        elif request.method == "nice":
            if request.preset:
                if request.preset not in PRESETS:
                    raise InvalidInputError(f"Unknown preset {request.preset!r}")
                sel = PRESETS[request.preset]()
            elif request.selection is not None:
                sel = selection_from_dict(request.selection)
            else:
                raise InvalidInputError("nice needs a selection or a preset")
            check_against(sel, sys)
            violations = validate_nice(sel)
            if violations:
                raise InvalidInputError("Selection is not nice: " + "; ".join(violations))
            if request.row_selection is not None:
                alpha = selection_from_dict(request.row_selection)
                check_against(alpha, sys)
                report = reduce_alphabeta(sys, alpha, sel, tol)
                check = lambda: check_selection(sys, report.reduced, (alpha, sel), max_words=limit)
            else:
                reducer = reduce_beta if isinstance(sel, NiceColumnSelection) else reduce_alpha
                report = reducer(sys, sel, tol)
                check = lambda: check_selection(sys, report.reduced, sel, max_words=limit)
        elif request.method == "sequence":
            if not request.upsilon:
                raise InvalidInputError("sequence needs upsilon")
            upsilon = parse_word(request.upsilon, sys.D)
            report = match_sequence(sys, upsilon, request.side, tol)
            check = lambda: check_selection(sys, report.reduced, sequence_languages(sys, upsilon, request.side),
                                            max_words=limit)
        else:
            raise InvalidInputError(f"Unknown method {request.method!r}")
    except (LssError, ValueError) as e:
        raise _http_error(e)

    result = {
        "original_dim": sys.n,
        "reduced": report.reduced.to_dict(),
        **report.summary(),
    }
    # the reduction stands even when its check would list too many entries
    try:
        result["max_error"] = check()
    except SizeLimitError as e:
        result["max_error"] = None
        result["check_skipped"] = str(e)
    except (LssError, ValueError) as e:
        raise _http_error(e)
    return result


@app.post("/verify")
def verify(request: VerifyRequest):
    """
    Minimality of a system and, with a reduced model, its largest Markov-parameter error up to N.
    """
    settings = get_settings()
    tol = settings.rank_tol
    try:
        sys = request.model.to_lss()
        result = {
            "span_reachable": is_span_reachable(sys, tol),
            "observable": is_observable(sys, tol),
            "minimal": is_minimal(sys, tol),
        }
        if request.reduced is not None:
            result["N"] = request.N
            result["max_markov_error"] = check_partial_realization(
                sys, request.reduced.to_lss(), request.N, settings.max_words)
    except (LssError, ValueError) as e:
        raise _http_error(e)
    return result


if __name__ == "__main__":
    import uvicorn
    print("=" * 60)
    print("🚀 Starting lssreduce API on http://0.0.0.0:8000")
    print("=" * 60)
    uvicorn.run(app, host="0.0.0.0", port=8000)
