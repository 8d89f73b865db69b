"""Dirichlet solver: exact small solutions, flags, residuals, energy."""

import pytest

from nlresolvent import (
    ExplicitGraph,
    Potential,
    SolveOptions,
    VertexFunction,
    bounded_atan,
    energy_functional,
    finite_path,
    identity,
    odd_power,
    residual,
    solve_dirichlet,
)

ID = identity()


# --- exact hand-solved instances -------------------------------------------
# pair, W = 1, f = delta_0, phi = id:  (u0 - u1) + u0 = 1, (u1 - u0) + u1 = 0
# gives u = (2/3, 1/3); energy = Q + sum Phi(f - Wu) m / W = 1/9 + 1/9 + 1/9.


def test_pair_delta_exact(pair, unit_potential):
    res = solve_dirichlet(pair, unit_potential, ID, VertexFunction.delta(0), [0, 1])
    assert res.converged
    assert res.u(0) == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert res.u(1) == pytest.approx(1.0 / 3.0, abs=1e-9)
    assert res.energy_value == pytest.approx(1.0 / 3.0, abs=1e-9)


def test_pair_delta_with_w_two(pair):
    # (t0 - t1) + 2 t0 = 1 and (t1 - t0) + 2 t1 = 0  =>  (3/8, 1/8)
    res = solve_dirichlet(pair, Potential.constant(2.0), ID, VertexFunction.delta(0), [0, 1])
    assert res.u(0) == pytest.approx(3.0 / 8.0, abs=1e-9)
    assert res.u(1) == pytest.approx(1.0 / 8.0, abs=1e-9)


def test_isolated_vertex_is_f_over_w():
    # L u = 0 there, so phi^{-1}(0) + W u = f regardless of phi
    g = ExplicitGraph({7: 1.0}, {})
    for nl in (ID, odd_power(3.0), bounded_atan()):
        res = solve_dirichlet(g, Potential.constant(2.0), nl, VertexFunction({7: 3.0}), [7])
        assert res.converged
        assert res.u(7) == pytest.approx(1.5, abs=1e-10)


def test_zero_data_gives_zero(path3, unit_potential):
    res = solve_dirichlet(path3, unit_potential, odd_power(3.0), VertexFunction.zero(), [0, 1, 2])
    assert res.converged
    assert res.u.support == ()
    assert res.energy_value == 0.0


def test_empty_unknown_set(pair, unit_potential):
    res = solve_dirichlet(pair, unit_potential, ID, VertexFunction.delta(0), [])
    assert res.converged
    assert res.u.support == ()


def test_data_outside_u_does_not_leak(path3, unit_potential):
    # f lives at vertex 2 only; with U = {0, 1} the Dirichlet value
    # u(2) = 0 is what couples in, so the solution is identically zero
    res = solve_dirichlet(path3, unit_potential, ID, VertexFunction.delta(2), [0, 1])
    assert res.converged
    assert res.u.support == ()


# --- invariants -------------------------------------------------------------


def test_sup_norm_bound(path3):
    W = Potential.constant(0.5)
    f = VertexFunction({0: 1.0, 1: -2.0, 2: 0.5})
    for nl in (ID, odd_power(3.0), odd_power(0.5)):
        res = solve_dirichlet(path3, W, nl, f, [0, 1, 2])
        assert res.u.sup_norm() <= f.sup_norm() / W.W0 + 1e-9


def test_monotone_iteration_for_nonnegative_data(chain4, unit_potential):
    f = VertexFunction({k: 1.0 for k in range(8)})
    res = solve_dirichlet(chain4, unit_potential, ID, f, list(range(8)))
    assert res.converged
    assert res.max_decrease <= 1e-9
    assert all(res.u(x) >= -1e-12 for x in range(8))


def test_sweep_orders_agree(chain4, unit_potential):
    f = VertexFunction({k: float(k % 3) for k in range(6)})
    U = list(range(6))
    a = solve_dirichlet(chain4, unit_potential, ID, f, U,
                        opts=SolveOptions(sweep_order="bfs-from-root"))
    b = solve_dirichlet(chain4, unit_potential, ID, f, U,
                        opts=SolveOptions(sweep_order="natural"))
    for x in U:
        assert a.u(x) == pytest.approx(b.u(x), abs=1e-8)


def test_warm_start_reuses_solution(pair, unit_potential):
    f = VertexFunction.delta(0)
    first = solve_dirichlet(pair, unit_potential, ID, f, [0, 1])
    again = solve_dirichlet(pair, unit_potential, ID, f, [0, 1], start=first.u)
    assert again.converged
    assert again.sweeps_used <= 2
    assert again.u(0) == pytest.approx(first.u(0), abs=1e-10)


def test_scaled_residual_handles_huge_data(pair, unit_potential):
    # at f ~ 1e12 an absolute residual of 1e-9 is below float resolution
    opts = SolveOptions()
    f = VertexFunction({0: 1e12, 1: 1e12})
    res = solve_dirichlet(pair, unit_potential, ID, f, [0, 1], opts=opts)
    assert res.converged
    assert res.residual_inf <= opts.residual_tol * (1.0 + f.sup_norm())


def test_energy_at_solution_is_minimal(path3, unit_potential):
    f = VertexFunction({0: 1.0, 1: 0.6, 2: 0.9})
    for nl in (ID, odd_power(3.0)):
        res = solve_dirichlet(path3, unit_potential, nl, f, [0, 1, 2])
        base = energy_functional(path3, unit_potential, nl, f, res.u, [0, 1, 2])
        for x in (0, 1, 2):
            for eps in (1e-3, -1e-3, 1e-2):
                bumped = res.u.as_dict()
                bumped[x] = bumped.get(x, 0.0) + eps
                e = energy_functional(path3, unit_potential, nl, f,
                                      VertexFunction(bumped), [0, 1, 2])
                assert e >= base - 1e-10


def test_energy_functional_hand_value(pair, unit_potential):
    # u = delta_0: Q = 1, both kappa terms vanish since f - Wu = 0 on supp
    e = energy_functional(pair, unit_potential, ID, VertexFunction.delta(0),
                          VertexFunction.delta(0), [0, 1])
    assert e == pytest.approx(1.0, abs=1e-12)


# --- flags and failure modes -------------------------------------------------


def test_non_convergence_is_flagged_not_raised(chain4, unit_potential):
    f = VertexFunction({k: 1.0 for k in range(12)})
    res = solve_dirichlet(chain4, unit_potential, ID, f, list(range(12)),
                          opts=SolveOptions(max_sweeps=1))
    assert not res.converged
    assert res.sweeps_used == 1
    assert res.residual_inf > 0.0


def test_potential_below_certificate_rejected(pair):
    W = Potential(lambda x: 0.1, W0=1.0)
    with pytest.raises(ValueError):
        solve_dirichlet(pair, W, ID, VertexFunction.delta(0), [0, 1])


def test_residual_report_range_violations(pair, unit_potential):
    # L u = +-20 falls outside ran atan = (-pi/2, pi/2)
    u = VertexFunction({0: 10.0, 1: -10.0})
    rep = residual(pair, unit_potential, bounded_atan(), VertexFunction.delta(0), u, [0, 1])
    assert not rep.ok
    assert rep.range_violations
    violated = [x for x, _ in rep.range_violations]
    assert 0 in violated


def test_residual_report_at_solution(pair, unit_potential):
    res = solve_dirichlet(pair, unit_potential, ID, VertexFunction.delta(0), [0, 1])
    rep = residual(pair, unit_potential, ID, VertexFunction.delta(0), res.u, [0, 1])
    assert rep.ok
    assert rep.sup <= 1e-9
    assert set(rep.values) == {0, 1}


def test_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(sweep_tol=0.0)
    with pytest.raises(ValueError):
        SolveOptions(max_sweeps=0)
    with pytest.raises(ValueError):
        SolveOptions(sweep_order="spiral")
