"""JSON encoding of every computed object, with rationals as ``"p/q"`` strings.

``dump`` produces plain JSON-ready data tagged with ``"type"``; ``load``
inverts it exactly. Scalars without a tag are rationals.
"""

from __future__ import annotations

from fractions import Fraction

from ._exact import INFINITY, Enclosure, fmt, parse
from .energy import OTSolution
from .fdnorm import FiniteDimNorm, RelativeSpectrum
from .measures import DiscreteMeasure, PLMeasure1D
from .polytope import AffinePiece, ConcavePLFunction, ConvexPLFunction, RationalPolytope
from .sampled import SampledConcave
from .toricnorm import QuotientResult, ToricHomNorm, TruncatedToricNorm, TypeCertificate


def _vec(v):
    return [fmt(x) for x in v]


def _unvec(v):
    return tuple(parse(x) for x in v)


def _atom(a):
    return _vec(a) if isinstance(a, tuple) else fmt(a)


def _unatom(a):
    return _unvec(a) if isinstance(a, list) else parse(a)


def _piece(p: AffinePiece) -> dict:
    # slopes on the line are written as scalars
    slope = fmt(p.slope[0]) if len(p.slope) == 1 else _vec(p.slope)
    return {"slope": slope, "const": fmt(p.const)}


def _unpiece(d) -> AffinePiece:
    s = d["slope"]
    return AffinePiece((parse(s),) if isinstance(s, str) else _unvec(s), parse(d["const"]))


def dump(obj):
    """Encode ``obj`` as JSON-ready data."""
    if obj is INFINITY or isinstance(obj, (Fraction, int)) and not isinstance(obj, bool):
        return fmt(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, Enclosure):
        return {"type": "enclosure", "lo": fmt(obj.lo), "hi": fmt(obj.hi)}
    if isinstance(obj, RationalPolytope):
        return {"type": "polytope", "vertices": [_vec(v) for v in obj.vertices]}
    if isinstance(obj, AffinePiece):
        return {"type": "affine", **_piece(obj)}
    if isinstance(obj, ConcavePLFunction):
        return {"type": "concave-pl", "polytope": dump(obj.P),
                "pieces": [_piece(p) for p in obj.pieces]}
    if isinstance(obj, ConvexPLFunction):
        return {"type": "convex-pl", "pieces": [_piece(p) for p in obj.pieces]}
    if isinstance(obj, SampledConcave):
        out = {"type": "sampled", "polytope": dump(obj.P), "pitch": fmt(obj.pitch),
               "values": _vec(obj.values)}
        if obj.poly is not None:
            out["poly"] = _vec(obj.poly)
        return out
    if isinstance(obj, ToricHomNorm):
        return {"type": "toric-norm", "data": dump(obj.g)}
    if isinstance(obj, TruncatedToricNorm):
        return {"type": "truncated-norm", "polytope": dump(obj.P), "degree": obj.d,
                "growth": fmt(obj.growth),
                "table": [{"m": m, "point": list(a), "value": fmt(v)}
                          for m in obj.degrees for a, v in sorted(obj.table[m].items())]}
    if isinstance(obj, DiscreteMeasure):
        return {"type": "discrete-measure", "atoms": [_atom(a) for a in obj.atoms],
                "masses": _vec(obj.masses)}
    if isinstance(obj, PLMeasure1D):
        return {"type": "pl-measure", "breakpoints": _vec(obj.breakpoints),
                "pieces": [_vec(p) for p in obj.pieces]}
    if isinstance(obj, FiniteDimNorm):
        return {"type": "fd-norm", "values": _vec(obj.values),
                "basis": None if obj.basis is None else [_vec(b) for b in obj.basis]}
    if isinstance(obj, RelativeSpectrum):
        return {"type": "relative-spectrum", "values": _vec(obj.values)}
    if isinstance(obj, OTSolution):
        return {"type": "ot-solution", "atoms": [_vec(a) for a in obj.atoms],
                "weights": [repr(w) for w in obj.weights],
                "masses": [repr(m) for m in obj.masses], "target": _vec(obj.target),
                "objective": repr(obj.objective), "iterations": obj.iterations,
                "residual": repr(obj.residual)}
    if isinstance(obj, QuotientResult):
        return {"type": "quotient", "value": fmt(obj.value), "shift": fmt(obj.shift),
                "exact": obj.exact}
    if isinstance(obj, TypeCertificate):
        return {"type": "certificate", "holds": obj.holds,
                "pieces": [_piece(p) for p in obj.pieces], "reason": obj.reason}
    if isinstance(obj, (tuple, list)):
        return [dump(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): dump(v) for k, v in obj.items()}
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load(data):
    """Inverse of ``dump``."""
    if isinstance(data, str):
        return parse(data)
    if isinstance(data, list):
        return [load(x) for x in data]
    if not isinstance(data, dict) or "type" not in data:
        raise ValueError(f"untagged JSON object: {data!r}")
    t = data["type"]
    if t == "enclosure":
        return Enclosure(parse(data["lo"]), parse(data["hi"]))
    if t == "polytope":
        return RationalPolytope.from_points(_unvec(v) for v in data["vertices"])
    if t == "affine":
        return _unpiece(data)
    if t == "concave-pl":
        return ConcavePLFunction(load(data["polytope"]), tuple(_unpiece(p) for p in data["pieces"]))
    if t == "convex-pl":
        return ConvexPLFunction(tuple(_unpiece(p) for p in data["pieces"]))
    if t == "sampled":
        poly = _unvec(data["poly"]) if "poly" in data else None
        return SampledConcave(load(data["polytope"]), parse(data["pitch"]),
                              _unvec(data["values"]), poly)
    if t == "toric-norm":
        return ToricHomNorm(load(data["data"]))
    if t == "truncated-norm":
        table: dict = {}
        for e in data["table"]:
            table.setdefault(int(e["m"]), {})[tuple(int(x) for x in e["point"])] = parse(e["value"])
        return TruncatedToricNorm(load(data["polytope"]), int(data["degree"]), table,
                                  growth=parse(data["growth"]))
    if t == "discrete-measure":
        return DiscreteMeasure(tuple(_unatom(a) for a in data["atoms"]), _unvec(data["masses"]))
    if t == "pl-measure":
        return PLMeasure1D(_unvec(data["breakpoints"]), tuple(_unvec(p) for p in data["pieces"]))
    if t == "fd-norm":
        basis = data["basis"]
        return FiniteDimNorm(_unvec(data["values"]),
                             None if basis is None else tuple(_unvec(b) for b in basis))
    if t == "relative-spectrum":
        return RelativeSpectrum(_unvec(data["values"]))
    if t == "ot-solution":
        return OTSolution(tuple(_unvec(a) for a in data["atoms"]),
                          tuple(float(w) for w in data["weights"]),
                          tuple(float(m) for m in data["masses"]), _unvec(data["target"]),
                          float(data["objective"]), int(data["iterations"]),
                          float(data["residual"]))
    if t == "quotient":
        return QuotientResult(parse(data["value"]), parse(data["shift"]), bool(data["exact"]))
    if t == "certificate":
        return TypeCertificate(bool(data["holds"]), tuple(_unpiece(p) for p in data["pieces"]),
                               data["reason"])
    raise ValueError(f"unknown type tag {t!r}")
