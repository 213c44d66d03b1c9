"""Local symbols at infinity as residue vectors over characteristic-zero lifts.

The symbol (u, alpha) of a vector of Laurent series and a unit power series
is pinned down by its ghost components: the j-th one is the residue of
Phi_j(u) dalpha/alpha.  In characteristic p the ghost map is singular, so
the computation runs upstairs: lift every coefficient to the unramified
extension of Z/p^m, take residues there, invert the ghost map with exact
p-divisions, and only then reduce mod p.  With m = 2n + 2 the reduction is
independent of the chosen lifts, which the tests exercise by lifting twice.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from .coeff import lift_ring, reduce_mod_p
from .errors import GhostInversionFailure, VanishingFailure
from .series import INF, TruncatedLaurentSeries
from .witt import WittVector

DEFAULT_GUARD = 2


def default_lift_precision(n):
    """Lift depth 2n + 2: inversion burns up to n digits, reduction needs
    one, and the rest is margin the consistency checks can see."""
    return 2 * n + DEFAULT_GUARD


def pole_depth(u):
    """Largest pole order appearing in any ghost component of u.

    Only exponents down to -pole_depth(u) of the ghost series pair with the
    non-negative exponents of dlog(alpha) when extracting residues, so this
    bounds the coefficient window every symbol computation needs."""
    p = u.ring.p
    depth = 0
    for j in range(u.n):
        for i in range(j + 1):
            if not u[i].is_exact_zero() and u[i].valuation() < 0:
                depth = max(depth, p ** (j - i) * -u[i].valuation())
    return depth


class LocalSymbolInput:
    """A symbol datum: series vector u, unit series alpha, lift depth m.

    Exact alphas are truncated to the window pole_depth(u) + 2, which loses
    nothing: deeper coefficients cannot reach the residue."""

    def __init__(self, u, alpha, m=None):
        if not isinstance(u, WittVector):
            u = WittVector(tuple(u))
        for entry in u:
            if not isinstance(entry, TruncatedLaurentSeries):
                raise ValueError("u must consist of Laurent series")
            if entry.ring != alpha.ring:
                raise ValueError("u and alpha must share a coefficient field")
        if alpha.ring.m != 1:
            raise ValueError("inputs live over a finite field, not a lift ring")
        if alpha.is_exact_zero() or alpha.valuation() != 0:
            raise ValueError("alpha must be a unit power series")
        if alpha.prec == INF:
            alpha = alpha.truncate(pole_depth(u) + DEFAULT_GUARD)
        self.u = u
        self.alpha = alpha
        self.n = u.n
        self.m = default_lift_precision(self.n) if m is None else m
        if self.m < self.n + 1:
            raise ValueError(f"lift depth {self.m} cannot survive {self.n} digits")

    @property
    def field(self):
        return self.alpha.ring


def canonical_lift(s, lift):
    """Reinterpret a series coefficient-wise in the lift ring.

    Field coefficients are stored as digit tuples mod p, which are already
    the canonical representatives, so the array transfers unchanged."""
    return TruncatedLaurentSeries(lift, s.v, s.coeffs.copy(), s.prec)


def perturbed_lift(s, lift, rng):
    """A different valid lift of the same series: adds random multiples of
    p to every stored digit."""
    p = lift.p
    noise = np.array(
        [
            [p * rng.randrange(lift.modulus // p) for _ in range(lift.f)]
            for _ in range(len(s.coeffs))
        ],
        dtype=np.int64,
    ).reshape(len(s.coeffs), lift.f)
    return TruncatedLaurentSeries(lift, s.v, s.coeffs + noise, s.prec)


def ghost_series(u_lifts, j):
    """Phi_j of the lifted vector: sum over i <= j of p^i u_i^(p^(j-i))."""
    p = u_lifts[0].ring.p
    total = None
    for i in range(j + 1):
        term = (u_lifts[i] ** (p ** (j - i))).scalar_mul(p**i)
        total = term if total is None else total + term
    return total


def _exact_p_division(x, k, lift):
    """Divide a lift-ring element by p^k, loudly checking divisibility."""
    q = lift.p**k
    coords = []
    for c in x.coords:
        if c % q:
            raise GhostInversionFailure(
                f"residue not divisible by p^{k}; lift depth too small or bug"
            )
        coords.append(c // q)
    return lift.from_coords(tuple(coords))


def symbol_from_lifts(u_lifts, alpha_lift, field):
    """Residue vector from explicit lifts; returns (symbol, certificate).

    The certificate carries the raw residues and the ghost-inverted digits
    in the lift ring so callers can audit the inversion at full depth."""
    lift = alpha_lift.ring
    p = lift.p
    n = len(u_lifts)
    dlog = alpha_lift.derivative() / alpha_lift
    residues = [(ghost_series(u_lifts, j) * dlog).residue() for j in range(n)]
    digits = []
    for j in range(n):
        acc = residues[j]
        for i in range(j):
            acc = acc - (p**i) * digits[i] ** (p ** (j - i))
        digits.append(_exact_p_division(acc, j, lift))
    symbol = WittVector(tuple(reduce_mod_p(w) for w in digits))
    if symbol.ring != field:
        raise ValueError("lift ring does not reduce onto the given field")
    return symbol, {"residues": residues, "digits": digits, "lift": lift}


def residue_vector(inp, with_certificate=False):
    """The local symbol of a datum, through the canonical coefficient lift."""
    field = inp.field
    lift = lift_ring(field.p, inp.m, field.f)
    u_lifts = [canonical_lift(s, lift) for s in inp.u]
    alpha_lift = canonical_lift(inp.alpha, lift)
    symbol, cert = symbol_from_lifts(u_lifts, alpha_lift, field)
    return (symbol, cert) if with_certificate else symbol


def nonzero_elements(field):
    """All q - 1 nonzero elements, in a fixed coordinate order."""
    out = []
    for coords in itertools.product(range(field.p), repeat=field.f):
        if any(coords):
            out.append(field.from_coords(coords))
    return out


def modulus_vanishing_test(u, bound, trials=50, rng=None, witness_budget=None):
    """Certify symbol vanishing above a conductor bound, and probe below it.

    Every alpha with 1 - alpha vanishing to order at least bound + 1 must
    give the zero symbol; a nonzero symbol there raises VanishingFailure.
    At order exactly bound the function searches for a nonzero witness and
    reports the outcome without asserting existence, since sharpness is a
    theorem only for the generic data the closed formula covers."""
    if not isinstance(u, WittVector):
        u = WittVector(tuple(u))
    field = u.ring
    if rng is None:
        rng = random.Random(0)
    window = pole_depth(u) + bound + 4
    one = TruncatedLaurentSeries.monomial(field, 0, 1)

    vanished = 0
    for _ in range(trials):
        tail = [
            (bound + 1 + k, field.random(rng))
            for k in range(1 + rng.randrange(max(1, window - bound - 1)))
        ]
        alpha = one + TruncatedLaurentSeries.from_terms(field, tail, prec=window)
        symbol = residue_vector(LocalSymbolInput(u, alpha))
        if not symbol.is_zero():
            raise VanishingFailure(
                f"nonzero symbol for 1 - alpha of order >= {bound + 1}"
            )
        vanished += 1

    units = nonzero_elements(field)
    candidates = [[(bound, c)] for c in units]
    candidates += [
        [(bound, c), (bound + 1, c2)] for c in units for c2 in units
    ]
    budget = len(candidates) if witness_budget is None else witness_budget
    witness = None
    tried = 0
    for terms in candidates[:budget]:
        tried += 1
        alpha = one + TruncatedLaurentSeries.from_terms(field, terms, prec=window)
        symbol = residue_vector(LocalSymbolInput(u, alpha))
        if not symbol.is_zero():
            witness = (alpha, symbol)
            break
    return {
        "p": field.p,
        "n": u.n,
        "bound": bound,
        "trials": vanished,
        "witness_found": witness is not None,
        "witness": witness,
        "witness_attempts": tried,
    }
