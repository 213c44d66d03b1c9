"""Local symbols: residues through lifts, ghost inversion, vanishing bounds."""

import random

import pytest

from wittram.coeff import finite_field, lift_ring
from wittram.errors import GhostInversionFailure, VanishingFailure
from wittram.localsym import (
    LocalSymbolInput,
    canonical_lift,
    ghost_series,
    modulus_vanishing_test,
    nonzero_elements,
    perturbed_lift,
    pole_depth,
    residue_vector,
    symbol_from_lifts,
)
from wittram.series import TruncatedLaurentSeries as TLS
from wittram.witt import WittVector, build_table, witt_add

F2 = finite_field(2, 1)
F3 = finite_field(3, 1)
F4 = finite_field(2, 2)
F5 = finite_field(5, 1)


def _mono(field, e, c):
    return TLS.monomial(field, e, c)


def _random_pole_vector(field, n, max_pole, rng):
    """Vector of Laurent polynomials with poles up to max_pole, first entry
    guaranteed a genuine pole of order prime to p."""
    entries = []
    for i in range(n):
        terms = []
        for e in range(-max_pole, 2):
            if rng.random() < 0.5:
                terms.append((e, field.random(rng)))
        entries.append(TLS.from_terms(field, terms))
    nu = max_pole if max_pole % field.p else max_pole - 1
    entries[0] = entries[0] + _mono(field, -nu, field.random_unit(rng))
    return WittVector(tuple(entries))


def _random_unit_series(field, window, rng):
    terms = [(0, field.random_unit(rng))]
    terms += [(k, field.random(rng)) for k in range(1, window)]
    return TLS.from_terms(field, terms, prec=window)


def test_simple_pole_symbol_frozen():
    # u = a/s against 1 - c s pairs to -ac; against 1 - c s^2 to zero
    rng = random.Random(7)
    for field in (F2, F3, F4, F5):
        for _ in range(5):
            a = field.random_unit(rng)
            c = field.random_unit(rng)
            u = WittVector((_mono(field, -1, a),))
            one = _mono(field, 0, 1)
            sym = residue_vector(LocalSymbolInput(u, one - _mono(field, 1, c)))
            assert sym.entries == (-(a * c),)
            sym2 = residue_vector(LocalSymbolInput(u, one - _mono(field, 2, c)))
            assert sym2.is_zero()


def test_alpha_one_and_zero_u():
    rng = random.Random(3)
    one = _mono(F3, 0, 1)
    u = _random_pole_vector(F3, 2, 5, rng)
    assert residue_vector(LocalSymbolInput(u, one)).is_zero()
    zero_u = WittVector((TLS.zero(F3),) * 3)
    alpha = _random_unit_series(F3, 6, rng)
    assert residue_vector(LocalSymbolInput(zero_u, alpha)).is_zero()


def test_input_validation():
    u = WittVector((_mono(F2, -1, F2.one()),))
    with pytest.raises(ValueError):
        LocalSymbolInput(u, _mono(F2, 1, 1))  # valuation 1, not a unit
    with pytest.raises(ValueError):
        LocalSymbolInput(u, _mono(F3, 0, 1))  # mixed coefficient fields
    with pytest.raises(ValueError):
        LocalSymbolInput(u, _mono(F2, 0, 1), m=1)  # lift depth too shallow


def test_pole_depth():
    u = WittVector((_mono(F2, -3, F2.one()), _mono(F2, -1, F2.one())))
    # ghost slot 1 sees u_0 squared: depth 6
    assert pole_depth(u) == 6
    reg = WittVector((_mono(F2, 2, F2.one()),))
    assert pole_depth(reg) == 0


def test_bilinearity_in_alpha():
    rng = random.Random(11)
    for field, n in [(F2, 2), (F3, 2), (F4, 2), (F2, 3), (F5, 1)]:
        table = build_table(field.p, n)
        for _ in range(4):
            u = _random_pole_vector(field, n, 3, rng)
            window = pole_depth(u) + 4
            alpha = _random_unit_series(field, window, rng)
            beta = _random_unit_series(field, window, rng)
            lhs = residue_vector(LocalSymbolInput(u, alpha * beta))
            sa = residue_vector(LocalSymbolInput(u, alpha))
            sb = residue_vector(LocalSymbolInput(u, beta))
            assert lhs == witt_add(sa, sb, table), (field.p, field.f, n)


def test_additivity_in_u():
    rng = random.Random(13)
    for field, n in [(F2, 2), (F3, 2), (F4, 2)]:
        table = build_table(field.p, n)
        for _ in range(3):
            u = _random_pole_vector(field, n, 2, rng)
            v = _random_pole_vector(field, n, 2, rng)
            usum = witt_add(u, v, table)
            window = max(pole_depth(u), pole_depth(v), pole_depth(usum)) + 4
            alpha = _random_unit_series(field, window, rng)
            lhs = residue_vector(LocalSymbolInput(usum, alpha))
            su = residue_vector(LocalSymbolInput(u, alpha))
            sv = residue_vector(LocalSymbolInput(v, alpha))
            assert lhs == witt_add(su, sv, table), (field.p, field.f, n)


def test_lift_independence():
    rng = random.Random(17)
    for field, n in [(F2, 2), (F3, 3), (F4, 2)]:
        u = _random_pole_vector(field, n, 3, rng)
        window = pole_depth(u) + 4
        alpha = _random_unit_series(field, window, rng)
        inp = LocalSymbolInput(u, alpha)
        lift = lift_ring(field.p, inp.m, field.f)
        base = residue_vector(inp)
        for _ in range(3):
            u_lifts = [perturbed_lift(s, lift, rng) for s in u]
            alpha_lift = perturbed_lift(alpha, lift, rng)
            other, _cert = symbol_from_lifts(u_lifts, alpha_lift, field)
            assert other == base, (field.p, field.f, n)


def test_certificate_ghost_consistency():
    # the inverted digits reproduce every residue exactly in the lift ring
    rng = random.Random(19)
    for field, n in [(F2, 3), (F3, 2), (F5, 2)]:
        u = _random_pole_vector(field, n, 3, rng)
        alpha = _random_unit_series(field, pole_depth(u) + 4, rng)
        sym, cert = residue_vector(LocalSymbolInput(u, alpha), with_certificate=True)
        lift = cert["lift"]
        p = field.p
        for j in range(n):
            ghost = lift.zero()
            for i in range(j + 1):
                ghost = ghost + (p**i) * cert["digits"][i] ** (p ** (j - i))
            assert ghost == cert["residues"][j], (field.p, n, j)
        assert sym.ring == field


def test_ghost_inversion_failure_is_loud():
    lift = lift_ring(2, 4)
    from wittram.localsym import _exact_p_division

    with pytest.raises(GhostInversionFailure):
        _exact_p_division(lift.from_int(6), 2, lift)
    assert _exact_p_division(lift.from_int(12), 2, lift) == lift.from_int(3)


def test_vanishing_and_sharp_witness_depth_one():
    # u = a/s^3 over F_2: symbols die above order 3 and a witness sits at 3
    u = WittVector((_mono(F2, -3, F2.one()),))
    report = modulus_vanishing_test(u, 3, trials=25, rng=random.Random(23))
    assert report["trials"] == 25
    assert report["witness_found"]
    alpha, sym = report["witness"]
    assert not sym.is_zero()
    assert (alpha - _mono(F2, 0, 1)).valuation() == 3


def test_vanishing_and_sharp_witness_depth_two():
    u = WittVector((_mono(F2, -3, F2.one()), TLS.zero(F2)))
    report = modulus_vanishing_test(u, 6, trials=15, rng=random.Random(29))
    assert report["witness_found"]
    _alpha, sym = report["witness"]
    # the order-6 witness shows up one digit deep, not in the first slot
    assert sym.entries[0].is_zero()
    assert not sym.entries[1].is_zero()


def test_vanishing_failure_below_true_bound():
    u = WittVector((_mono(F3, -2, F3.one()),))
    with pytest.raises(VanishingFailure):
        modulus_vanishing_test(u, 1, trials=40, rng=random.Random(31))


def test_extension_field_symbols_use_full_field():
    # over F_4 the symbol can land outside the prime field
    g = F4.gen()
    u = WittVector((_mono(F4, -1, g), TLS.zero(F4)))
    one = _mono(F4, 0, 1)
    alpha = one - _mono(F4, 1, F4.one())
    sym = residue_vector(LocalSymbolInput(u, alpha))
    assert sym.ring == F4
    assert sym.entries[0] == -g
    assert len(nonzero_elements(F4)) == 3


def test_canonical_lift_round_trip():
    rng = random.Random(41)
    lift = lift_ring(3, 4)
    s = _random_unit_series(F3, 6, rng)
    lifted = canonical_lift(s, lift)
    assert lifted.ring is lift
    assert lifted.prec == s.prec
    assert [int(c[0]) % 3 for c in lifted.coeffs] == [int(c[0]) for c in s.coeffs]


def test_ghost_series_matches_hand_expansion():
    lift = lift_ring(2, 4)
    u0 = TLS.monomial(lift, -1, 1)
    u1 = TLS.monomial(lift, -2, 1)
    g1 = ghost_series([u0, u1], 1)
    # u_0^2 + 2 u_1 = s^-2 + 2 s^-2 = 3 s^-2
    assert (g1 - TLS.monomial(lift, -2, 3)).is_exact_zero()
