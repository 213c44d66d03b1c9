"""Cyclic p-power covers of a Laurent-series base, built stage by stage.

A length-n generator datum u = (u_0, ..., u_{n-1}) of pole orders prime to p
determines a tower of n Artin-Schreier steps over k((s)).  Each stage is
realised concretely: the new local field is again a Laurent-series field in a
uniformizer t_{i+1}, the previous uniformizer and all solved generators are
re-expanded as certified-precision series in it, and every defining relation
is re-verified numerically before the stage is accepted.

The module exposes the per-stage operations (reduction to standard form,
stage extension, conjugate transport) as well as tower-level reports:
ramification filtration, transition function, conductor exponent, and the
cross-checked invariant families (m_i, e_i, mu_i).
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

from . import intpoly as ip
from .coeff import finite_field, pth_root
from .errors import (
    ConsistencyFailure,
    HasseArfViolation,
    InsufficientPrecision,
    NonTotallyRamified,
)
from .series import (
    TruncatedLaurentSeries,
    compose,
    nth_root,
    pth_power_decompose,
)
from .witt import WittVector, asw_correction_poly, build_table, witt_smul, xvar, yvar

INF = math.inf

DEFAULT_BUDGET_FACTOR = 4
BUDGET_ENV = "WITTRAM_BUDGET_FACTOR"
FULL_ORBIT_MAX = 27  # largest group order for which every conjugate is built


def budget_factor(override=None):
    """Window-length multiplier: argument, else environment, else default."""
    if override is not None:
        return int(override)
    env = os.environ.get(BUDGET_ENV)
    return int(env) if env else DEFAULT_BUDGET_FACTOR


class CoverDatum:
    """Length-n generator vector over k((s)), poles prime to p.

    Entries are certified-precision series in s.  The constructor checks the
    wild-cover hypothesis: every entry has a genuine pole whose order is not
    divisible by p.
    """

    def __init__(self, p, n, ring, entries):
        if len(entries) != n:
            raise ValueError(f"expected {n} entries, got {len(entries)}")
        self.p = p
        self.n = n
        self.ring = ring
        self.entries = tuple(entries)
        nu = []
        for i, e in enumerate(self.entries):
            if e.ring is not ring:
                raise ValueError("datum entries must share one coefficient field")
            v = e.valuation()
            if v >= 0:
                raise ValueError(f"entry {i} has no pole (valuation {v})")
            if (-v) % p == 0:
                raise ValueError(f"entry {i} pole order {-v} divisible by p={p}")
            nu.append(-v)
        self.nu = tuple(nu)

    @classmethod
    def from_orders(cls, p, n, f, nu):
        """Shorthand datum u_i = s^(-nu_i) over the field with p^f elements."""
        ring = finite_field(p, f)
        if len(nu) != n:
            raise ValueError(f"expected {n} pole orders, got {len(nu)}")
        entries = [TruncatedLaurentSeries.monomial(ring, -v) for v in nu]
        return cls(p, n, ring, entries)

    def __repr__(self):
        return f"CoverDatum(p={self.p}, n={self.n}, nu={self.nu})"


def standard_form_reduce(z):
    """Strip p-divisible pole terms from z by subtracting x^p - x pieces.

    Returns (z_std, h) with z - z_std = h^p - h and z_std of pole order prime
    to p.  Raises NonTotallyRamified when the reduced datum has no pole left
    (the step would be unramified or split), and InsufficientPrecision when
    the window cannot certify a valuation.
    """
    ring = z.ring
    if not ring.is_field:
        raise ValueError("standard form reduction needs field coefficients")
    p = ring.p
    h = TruncatedLaurentSeries.zero(ring)
    while True:
        if z.is_exact_zero():
            raise NonTotallyRamified("datum reduced to zero: split step")
        v = z.valuation()
        if v >= 0:
            raise NonTotallyRamified(
                f"reduced datum regular (valuation {v}): step not totally ramified"
            )
        if (-v) % p != 0:
            return z, h
        root = pth_root(z.leading_coeff())
        term = TruncatedLaurentSeries.monomial(ring, v // p, root)
        h = h + term
        z = z - (term.pth_power() - term)


def _bezout_exponents(e, p):
    """Minimal a in [1, p-1] and matching b with -a*e + b*p = 1."""
    assert e % p != 0
    a = (-pow(e, -1, p)) % p
    if a == 0:
        a = p
    b = (1 + a * e) // p
    assert -a * e + b * p == 1
    return a, b


def _solve_stage(z_std, ring, window):
    """Solve one Artin-Schreier step in its own Laurent-series model.

    Given the standard-form datum z_std (pole order e prime to p, series in
    the current uniformizer t), produce series T and Y in the next
    uniformizer tau with

        Y^p - Y = z_std(T),        Y^a * T^b = tau,

    where -a*e + b*p = 1.  T re-expands t and Y re-expands the standard
    generator; v(T) = p and v(Y) = -e.  Both relations are re-verified on
    the full window before returning.
    """
    p = ring.p
    e = -z_std.valuation()
    a, b = _bezout_exponents(e, p)
    c = z_std.leading_coeff()

    tau = TruncatedLaurentSeries.monomial(ring, 1)
    y_lead = c**b
    T = TruncatedLaurentSeries.monomial(ring, p, c ** (-a)).truncate(window)

    gain = max(1, (p - 1) * e)
    max_rounds = 6 + 2 * (window // gain + 1)
    prev_val = None
    Y = None
    for _ in range(max_rounds):
        # Y from the unit relation, with the forced leading root
        Y = nth_root(tau * T ** (-b), a, leading_root=y_lead)
        rho = Y.pth_power() - Y - compose(z_std, T)
        if not len(rho.coeffs):
            break
        rv = rho.valuation()
        if prev_val is not None and rv <= prev_val:
            raise InsufficientPrecision(
                f"stage solver stalled at residual valuation {rv}"
            )
        prev_val = rv
        dz = compose(z_std.derivative(), T)
        T = (T + rho / dz).truncate(window)
    else:
        raise InsufficientPrecision("stage solver exhausted its round budget")

    # mandatory post-hoc certification of both relations
    res1 = Y.pth_power() - Y - compose(z_std, T)
    if len(res1.coeffs):
        raise ConsistencyFailure("stage relation Y^p - Y = z(T) fails on window")
    res2 = Y**a * T**b - tau
    if len(res2.coeffs):
        raise ConsistencyFailure("stage relation Y^a T^b = tau fails on window")
    assert T.valuation() == p and Y.valuation() == -e
    return T, Y, a, b


_CORR_POLY_CACHE = {}


def _correction_poly(p, i):
    """Mod-p coupling polynomial in slots 0..i-1 for generator equation i."""
    key = (p, i)
    if key not in _CORR_POLY_CACHE:
        table = build_table(p, i + 1)
        _CORR_POLY_CACHE[key] = asw_correction_poly(table, i)
    return _CORR_POLY_CACHE[key]


def _eval_poly_on_series(poly, ring, vals):
    """Evaluate a packed integer polynomial on series values."""
    zero = TruncatedLaurentSeries.zero(ring)
    one = TruncatedLaurentSeries.monomial(ring, 0)
    return ip.p_eval(poly, vals, zero, one)


def _compose_or_zero(f, g):
    """f(g) that tolerates exact-zero and empty-window f."""
    if f.is_exact_zero():
        return f
    if not len(f.coeffs):
        return TruncatedLaurentSeries.zero_to(f.ring, int(f.prec) * g.valuation())
    return compose(f, g)


class TowerStage:
    """Stage i of the tower: the field k((t_i)) with everything re-expanded.

    Carries the embeddings of s, of every uniformizer below, and of every
    solved generator (both the standard-form ones and the true solutions),
    plus the invariant families m, e, mu up to level i.  Per-level artifacts
    (standard datum, adjustment, correction series, unit-relation exponents)
    are kept in the coordinates of their own level for cheap re-use.
    """

    def __init__(self, datum, window):
        ring = datum.ring
        self.datum = datum
        self.level = 0
        self.ring = ring
        self.window = window
        ident = TruncatedLaurentSeries.monomial(ring, 1)
        self.s = ident  # exact at the base: maximises downstream precision
        self.t_embs = [ident]
        self.y = []
        self.ytilde = []
        self.z_std = []
        self.h_adj = []
        self.corr = []
        self.bezout = []
        self.m = [0]
        self.e = [0]
        self.mu = [0]

    @property
    def p(self):
        return self.datum.p

    def uniformizer(self):
        return TruncatedLaurentSeries.monomial(self.ring, 1)

    def check_relations(self):
        """Re-verify every solved level's defining relation in t_i terms."""
        for j in range(self.level):
            lhs = self.ytilde[j].pth_power() - self.ytilde[j]
            rhs = compose(self.z_std[j], self.t_embs[j])
            if not lhs.agrees_with(rhs):
                raise ConsistencyFailure(
                    f"level-{j} relation fails at stage {self.level}"
                )
        v = self.s.valuation()
        if v != self.p**self.level:
            raise ConsistencyFailure(f"base uniformizer has valuation {v}")


def extend_stage(stage, budget):
    """Solve equation i of the datum and return stage i+1.

    budget is the window length for series at the new stage.  The step:
    evaluate the right-hand side u_i - W_i(y) in t_i coordinates, reduce to
    standard form, solve the Artin-Schreier relation together with the unit
    relation for the next uniformizer, then re-expand every stored series
    through T.  The invariant recursions are cross-checked against the
    observed pole orders and any mismatch raises ConsistencyFailure.
    """
    datum = stage.datum
    i = stage.level
    if i >= datum.n:
        raise ValueError(f"datum has length {datum.n}; stage {i} is final")
    p, ring = datum.p, datum.ring

    u_i = compose(datum.entries[i], stage.s) if i else datum.entries[i]
    if i == 0:
        corr_series = TruncatedLaurentSeries.zero(ring)
    else:
        poly = _correction_poly(p, i)
        vals = {yvar(j): stage.y[j] for j in range(i)}
        corr_series = _eval_poly_on_series(poly, ring, vals)
    z = u_i - corr_series
    z_std, h = standard_form_reduce(z)

    e_new = -z_std.valuation()
    m_new = max(p * stage.m[i], datum.nu[i])
    e_pred = p**i * m_new - stage.mu[i]
    if e_new != e_pred:
        raise ConsistencyFailure(
            f"stage {i}: observed break {e_new}, recursion predicts {e_pred}"
        )
    mu_new = p ** (i + 1) * m_new - e_new

    T, Y, a, b = _solve_stage(z_std, ring, budget)

    new = TowerStage.__new__(TowerStage)
    new.datum = datum
    new.level = i + 1
    new.ring = ring
    new.window = budget
    new.s = compose(stage.s, T) if i else T
    new.t_embs = [compose(emb, T) for emb in stage.t_embs]
    new.t_embs.append(TruncatedLaurentSeries.monomial(ring, 1))
    new.y = [compose(yj, T) for yj in stage.y]
    new.ytilde = [compose(yj, T) for yj in stage.ytilde]
    h_pulled = _compose_or_zero(h, T)
    new.y.append(Y + h_pulled)
    new.ytilde.append(Y)
    new.z_std = stage.z_std + [z_std]
    new.h_adj = stage.h_adj + [h]
    new.corr = stage.corr + [corr_series]
    new.bezout = stage.bezout + [(a, b)]
    new.m = stage.m + [m_new]
    new.e = stage.e + [e_new]
    new.mu = stage.mu + [mu_new]

    for j in range(new.level):
        want = -(p ** (i - j)) * new.e[j + 1]
        got = new.ytilde[j].valuation()
        if got != want:
            raise ConsistencyFailure(
                f"standard generator {j} has valuation {got}, expected {want}"
            )
    new.check_relations()
    return new


class Tower:
    """Fully built tower: the stage sequence plus planning metadata."""

    def __init__(self, datum, stages, factor):
        self.datum = datum
        self.stages = stages  # stages[i] has level i; stages[n] is the top
        self.top = stages[-1]
        self.factor = factor

    @property
    def p(self):
        return self.datum.p

    @property
    def n(self):
        return self.datum.n

    @property
    def ring(self):
        return self.datum.ring

    def __repr__(self):
        return (
            f"Tower(p={self.p}, n={self.n}, nu={self.datum.nu}, "
            f"e={tuple(self.top.e[1:])})"
        )


def predicted_invariants(p, n, nu):
    """Closed-form m/e/mu families from pole orders alone (planning aid)."""
    m, e, mu = [0], [0], [0]
    for i in range(n):
        m_new = max(p * m[i], nu[i])
        e_new = p**i * m_new - mu[i]
        m.append(m_new)
        e.append(e_new)
        mu.append(p ** (i + 1) * m_new - e_new)
    return m, e, mu


def _stage_budgets(p, n, top_window):
    """Window plan: geometric in the stage, constant guard on top."""
    return [
        -(-top_window // p ** (n - 1 - i)) + 2 * p + 8 for i in range(n)
    ]


def build_tower(datum, factor=None, retries=3):
    """Build all n stages with planned windows; double the budget on failure."""
    fac = budget_factor(factor)
    _, e_hat, _ = predicted_invariants(datum.p, datum.n, datum.nu)
    last_exc = None
    for _attempt in range(retries):
        top_window = fac * (e_hat[-1] + datum.p**datum.n) + 16
        try:
            stages = [TowerStage(datum, top_window)]
            for budget in _stage_budgets(datum.p, datum.n, top_window):
                stages.append(extend_stage(stages[-1], budget))
            return Tower(datum, stages, fac)
        except InsufficientPrecision as exc:
            last_exc = exc
            fac *= 2
    raise InsufficientPrecision(
        f"tower build failed after {retries} budget doublings: {last_exc}"
    )


def analyze_tower(datum, factor=None, retries=3, mode=None):
    """Build, filter and cross-check in one call, escalating the budget.

    The invariant checks can outrun a window that sufficed for the build
    itself (the chain-rule different reads a derivative whose leading term
    sits near p times the break), so precision failures anywhere in the
    pipeline restart it with a doubled factor.  Returns
    (tower, filtration, report)."""
    fac = budget_factor(factor)
    last_exc = None
    for _attempt in range(retries):
        try:
            tower = build_tower(datum, factor=fac, retries=1)
            filtration = ramification_filtration(tower, mode=mode)
            report = tower_invariants(tower, filtration)
            return tower, filtration, report
        except InsufficientPrecision as exc:
            last_exc = exc
            fac *= 2
    raise InsufficientPrecision(
        f"tower analysis failed after {retries} budget doublings: {last_exc}"
    )


# ---------- Galois conjugates ----------


def group_element_coordinates(p, n, g):
    """Coordinates over F_p of the residue class g in the length-n vectors."""
    fp = finite_field(p, 1)
    table = build_table(p, n)
    unit = WittVector(tuple([fp.one()] + [fp.zero()] * (n - 1)))
    vec = witt_smul(g % p**n, unit, table)
    return tuple(int(e.coords[0]) for e in vec.entries)


_DELTA_POLY_CACHE = {}


def _delta_poly(p, i, gbar):
    """Packed polynomial in the solution slots for sigma_g(y_i) - y_i.

    Translating the solution vector by the constant vector gbar moves
    component i by gbar_i + carry_i(y; gbar); the returned mod-p polynomial
    has the solution slots in xvar coordinates and gbar already filled in.
    """
    key = (p, i, tuple(gbar[: i + 1]))
    if key not in _DELTA_POLY_CACHE:
        table = build_table(p, i + 1)
        subs = {yvar(j): ip.const(gbar[j]) for j in range(i)}
        carry = ip.p_mod(ip.p_subst(ip.p_mod(table.c[i], p), subs), p)
        _DELTA_POLY_CACHE[key] = ip.p_mod(ip.p_add(carry, ip.const(gbar[i])), p)
    return _DELTA_POLY_CACHE[key]


def galois_conjugate(tower, g):
    """Series expansion of sigma_g(t_n) in t_n, built up the tower.

    sigma_g translates the solution vector by the coordinates of g; the
    per-level increments are evaluated in their own stage's (small) window
    and transported up by one composition each, then the unit relations
    rebuild the conjugate uniformizer level by level.
    """
    p, n = tower.p, tower.n
    top = tower.top
    g = g % p**n
    if g == 0:
        return top.t_embs[n]
    gbar = group_element_coordinates(p, n, g)
    stages = tower.stages

    sig_t = top.t_embs[0]
    for j in range(n):
        poly = _delta_poly(p, j, gbar)
        vals = {xvar(l): stages[j].y[l] for l in range(j)}
        delta_j = _eval_poly_on_series(poly, tower.ring, vals)
        delta_top = _compose_or_zero(delta_j, top.t_embs[j])
        sig_y = top.y[j] + delta_top
        h = top.h_adj[j]
        sig_ytilde = sig_y - compose(h, sig_t) if len(h.coeffs) else sig_y
        a, b = top.bezout[j]
        sig_t = sig_ytilde**a * sig_t**b
    return sig_t


class RamificationFiltration:
    """Lower-numbering jump data of a built tower.

    jumps carries (element order, i(g), class size) per cyclic-order class;
    breaks are the integers u with G_u != G_(u+1); different is the exponent
    of the different, Sum over u >= 0 of (|G_u| - 1) = Sum over g != 1 of
    i(g).
    """

    def __init__(self, p, n, jumps, mode):
        self.p = p
        self.n = n
        self.jumps = tuple(jumps)
        self.mode = mode
        self.breaks = tuple(sorted({i_g - 1 for (_o, i_g, _m) in jumps}))
        self.different = sum(i_g * m for (_o, i_g, m) in jumps)

    def group_order(self, u):
        """|G_u| for integer u >= 0."""
        return 1 + sum(m for (_o, i_g, m) in self.jumps if i_g >= u + 1)

    def segments(self):
        """[(lo, hi, order)] with |G_u| = order for lo <= u <= hi."""
        out = []
        lo = 0
        for br in self.breaks:
            out.append((lo, br, self.group_order(lo)))
            lo = br + 1
        out.append((lo, None, 1))
        return out


def ramification_filtration(tower, mode=None):
    """Measure i(g) = v(sigma_g(t_n) - t_n) and assemble the filtration.

    mode 'full' builds every nontrivial conjugate (the default for group
    order <= 27); mode 'reps' builds one representative per cyclic-order
    class and scales by the class size, which is exact because i(g) is
    constant on order classes (asserted in full mode, relied on in reps
    mode).
    """
    p, n = tower.p, tower.n
    order = p**n
    if mode is None:
        mode = "full" if order <= FULL_ORBIT_MAX else "reps"
    t_top = tower.top.t_embs[n]

    jumps = []
    if mode == "full":
        by_class = {}
        for g in range(1, order):
            gg, depth = g, 0
            while gg % p == 0:
                gg //= p
                depth += 1
            k = n - depth  # cyclic order of g is p^k
            sig = galois_conjugate(tower, g)
            by_class.setdefault(k, []).append((sig - t_top).valuation())
        for k, vals in sorted(by_class.items()):
            if len(set(vals)) != 1:
                raise ConsistencyFailure(
                    f"i(g) not constant on the order-p^{k} class: {sorted(set(vals))}"
                )
            jumps.append((p**k, vals[0], len(vals)))
    elif mode == "reps":
        for k in range(1, n + 1):
            sig = galois_conjugate(tower, p ** (n - k))
            i_g = (sig - t_top).valuation()
            jumps.append((p**k, i_g, p**k - p ** (k - 1)))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    filt = RamificationFiltration(p, n, jumps, mode)

    # jumps decrease strictly as the element order grows, every conjugate
    # moves t_n (totally ramified), and the break set matches the pole
    # orders of the standard-form data
    seq = [i_g for (_o, i_g, _m) in sorted(jumps)]
    if any(i_g < 1 for i_g in seq):
        raise ConsistencyFailure("some conjugate fixes t_n to valuation < 1")
    for earlier, later in zip(seq, seq[1:]):
        if later >= earlier:
            raise ConsistencyFailure(f"jumps not strictly decreasing: {jumps}")
    if list(filt.breaks) != list(tower.top.e[1:]):
        raise ConsistencyFailure(
            f"filtration breaks {filt.breaks} != stage pole orders {tower.top.e[1:]}"
        )
    if filt.group_order(0) != order:
        raise ConsistencyFailure("G_0 is not the full group")
    return filt


class HerbrandPhi:
    """Piecewise-linear transition function of a filtration (exact knots)."""

    def __init__(self, filtration):
        self.filtration = filtration
        g0 = filtration.group_order(0)
        knots = [(0, Fraction(0))]
        for lo, hi, order in filtration.segments():
            if hi is None:
                break
            x0, y0 = knots[-1]
            knots.append((hi, y0 + Fraction(order, g0) * (hi - x0)))
        self.knots = knots
        self.tail_slope = Fraction(1, g0)

    def __call__(self, u):
        knots = self.knots
        if u <= 0:
            return Fraction(u)
        for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
            if u <= x1:
                return y0 + (y1 - y0) * Fraction(u - x0, x1 - x0)
        x_last, y_last = knots[-1]
        return y_last + self.tail_slope * (u - x_last)


def herbrand_phi(filtration):
    return HerbrandPhi(filtration)


def conductor_exponent(filtration):
    """phi(last break) + 1, checking integrality of phi at every break.

    Non-integral values raise HasseArfViolation (they cannot occur for an
    abelian group; hitting one means the filtration itself is wrong).
    """
    phi = herbrand_phi(filtration)
    for br in filtration.breaks:
        val = phi(br)
        if val.denominator != 1:
            raise HasseArfViolation(f"phi({br}) = {val} is not an integer")
    return int(phi(filtration.breaks[-1])) + 1


def tower_invariants(tower, filtration=None):
    """Cross-checked invariant report for a built tower.

    Checks, for every level: the defining recursions of (m, e, mu); the
    telescoped forms of the break and of mu; mu_i = p^i m_i - e_i; and an
    independent different through the chain rule on the stage re-expansions
    D_(i+1) = p D_i + v(dT_i/d tau).  With a filtration, additionally:
    different = mu_n + p^n - 1, the transition function hits m_k at every
    break, and the conductor exponent is m_n + 1.  Raises
    ConsistencyFailure / HasseArfViolation on mismatch; returns the report.
    """
    p, n = tower.p, tower.n
    top = tower.top
    m, e, mu = top.m, top.e, top.mu

    for i in range(n):
        if m[i + 1] != max(p * m[i], tower.datum.nu[i]):
            raise ConsistencyFailure(f"m recursion fails at level {i + 1}")
        if e[i + 1] != p**i * m[i + 1] - mu[i]:
            raise ConsistencyFailure(f"e recursion fails at level {i + 1}")
        if mu[i + 1] != p ** (i + 1) * m[i + 1] - e[i + 1]:
            raise ConsistencyFailure(f"mu identity fails at level {i + 1}")
    for k in range(1, n + 1):
        tele_e = sum(p ** (i - 1) * (m[i] - m[i - 1]) for i in range(1, k + 1))
        if e[k] != tele_e:
            raise ConsistencyFailure(f"telescoped break fails at level {k}")
        tele_mu = sum((p**i - p ** (i - 1)) * m[i] for i in range(1, k + 1))
        if mu[k] != tele_mu:
            raise ConsistencyFailure(f"telescoped mu fails at level {k}")

    # independent different: chain rule through the stage re-expansions
    D = [0]
    mu_indep = [0]
    for i in range(n):
        T = tower.stages[i + 1].t_embs[i]  # t_i as a series in t_(i+1)
        D.append(p * D[i] + T.derivative().valuation())
        mu_indep.append(D[i + 1] - p ** (i + 1) + 1)
    if mu_indep != list(mu):
        raise ConsistencyFailure(
            f"chain-rule mu {mu_indep} != recursion mu {list(mu)}"
        )

    report = {
        "p": p,
        "n": n,
        "nu": tower.datum.nu,
        "m": tuple(m[1:]),
        "e": tuple(e[1:]),
        "mu": tuple(mu[1:]),
        "different": mu[n] + p**n - 1,
        "different_chain_rule": D[n],
        "conductor": m[n] + 1,
    }
    if D[n] != report["different"]:
        raise ConsistencyFailure(
            f"chain-rule different {D[n]} != mu_n + p^n - 1 = {report['different']}"
        )

    if filtration is not None:
        if filtration.different != report["different"]:
            raise ConsistencyFailure(
                f"filtration different {filtration.different} "
                f"!= {report['different']}"
            )
        phi = herbrand_phi(filtration)
        for k in range(1, n + 1):
            val = phi(e[k])
            if val.denominator != 1 or int(val) != m[k]:
                raise HasseArfViolation(f"phi(e_{k}) = {val}, expected m_{k} = {m[k]}")
            drop = mu[n] - p ** (n - k) * mu[k]
            if drop < 0:
                raise ConsistencyFailure(f"negative relative different at level {k}")
            report[f"relative_different_{k}"] = drop
        report["conductor_filtration"] = conductor_exponent(filtration)
        if report["conductor_filtration"] != report["conductor"]:
            raise ConsistencyFailure(
                f"conductor {report['conductor_filtration']} != m_n + 1"
            )
    return report


def adjust_decompose(tower, x, level=None):
    """Split x at a stage as g^p + h with v(h) = p^i v_s(x) + mu_i.

    x must be the pull-back of a base series whose valuation is prime to p;
    the split separates p-divisible exponents (the p-th power part) from the
    rest, and the valuation law pins the stage's adjustment exponent.
    Returns (g, h, mu_obs) and checks mu_obs against the stored invariant.
    """
    i = tower.n if level is None else level
    stage = tower.stages[i]
    p = tower.p
    vx = x.valuation()
    if vx % p**i != 0:
        raise ValueError(f"x (valuation {vx}) is not pulled back from the base")
    v_s = vx // p**i
    if v_s % p == 0:
        raise ValueError(f"base valuation {v_s} must be prime to p")
    g, h = pth_power_decompose(x)
    if h.is_exact_zero() or not h.has_certified_valuation():
        raise InsufficientPrecision("adjustment part not resolved in window")
    mu_obs = h.valuation() - p**i * v_s
    if mu_obs != stage.mu[i]:
        raise ConsistencyFailure(
            f"adjustment exponent {mu_obs} != stored mu_{i} = {stage.mu[i]}"
        )
    return g, h, mu_obs
