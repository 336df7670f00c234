"""Exact canonical liftings of Dwork hypersurfaces modulo p^2.

Thin wrapper around the compiled module. The heavy lifting lives in C++;
this package re-exports the bindings and adds a convenience `lift` call.
"""

try:
    from ._canlift import *  # installed layout: canlift/_canlift.so
    from . import _canlift as _impl
except ImportError:  # build-tree layout: _canlift.so next to the build dir
    from _canlift import *  # type: ignore[import-not-found]
    import _canlift as _impl  # type: ignore[import-not-found]

__all__ = [n for n in dir(_impl) if not n.startswith("_")] + ["lift"]
__version__ = "1.0.0"


def lift(p, N, lam, n=1, modulus=None, verify=True):
    """Solve for the canonical family parameter over ``lam``.

    ``lam`` may be a FieldElement or element text such as ``"3"`` or
    ``"1,2"``. Returns a dict with the smoothness/ordinarity flags and,
    when the parameter is smooth and ordinary, the solved Witt vector
    plus its residue mod p^2 when the base field is F_p; otherwise the
    eta entries stay None.
    """
    s = _impl.field(p, n, modulus)
    if isinstance(lam, str):
        lam = _impl.parse_field(s, lam)
    result = {
        "p": s.p,
        "n_ext": s.n,
        "N": N,
        "lambda": str(lam),
        "smooth": _impl.smooth(s, N, lam),
        "ordinary": False,
        "eta": None,
        "eta_zp2": None,
    }
    if result["smooth"]:
        result["ordinary"] = _impl.ordinary(s, N, lam)
    if result["ordinary"]:
        eta = _impl.canonical_eta(s, N, lam, verify)
        result["eta"] = eta
        if s.n == 1:
            result["eta_zp2"] = _impl.witt_prime_iso(eta)
    return result
