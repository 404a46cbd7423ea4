from __future__ import annotations

import pytest
from mpmath import mp

from hh_cfrac.arith import Poly
from hh_cfrac.bal import element_from_point
from hh_cfrac.cfengine import (
    DEGENERATE,
    REGULAR,
    chain_verify,
    cf_step,
    evaluate_path,
    expand,
    path_key,
    reconstruct_series,
    root_state,
    tree_to_dict,
)
from hh_cfrac.errors import DegenerateB, NoSuchChoice
from strategies import close_to, generic_curve, tol


def quartic_element():
    return element_from_point(Poly.of(1, 0, 0, 0, 1), 1, mp.sqrt(2))


def sextic_element():
    return element_from_point(Poly.of(1, 0, 0, 0, 0, 0, 1), 1, mp.sqrt(2))


def test_first_step_of_worked_genus_one_run():
    h = quartic_element()
    root = root_state(h)
    r2 = mp.sqrt(2)
    assert root.kind == REGULAR
    assert len(root.spare_roots) == 1 and close_to(root.spare_roots[0], -1)
    assert close_to(root.lam, r2 - 1)

    child = cf_step(h, root, 1)
    assert close_to(child.t, -1)
    assert close_to(child.sqrt_y, -r2)
    assert close_to(child.lam, -1 - r2)
    assert child.residuals["alpha_closed_form"] < 1e-60
    assert child.residuals["branch_sign"] < 1e-60


def test_genus_one_expansion_is_a_path_with_alternating_points():
    h = quartic_element()
    tree = expand(h, 4)
    assert len(tree) == 5
    ts = [st.t for st in tree.path_states((1, 1, 1, 1))]
    for i, t in enumerate(ts):
        assert close_to(t, 1 if i % 2 == 0 else -1)


def test_consecutive_points_product_genus_one():
    h = quartic_element()
    tree = expand(h, 4)
    states = tree.path_states((1, 1, 1, 1))
    p0, p4, q2 = h.X[0], h.X[4], mp.mpf(0)
    for cur, nxt in zip(states, states[1:]):
        rhs = 2 * p0 * (cur.lam - q2) / (p0 * cur.lam ** 2 - p4)
        assert close_to(cur.t * nxt.t, rhs)


def test_chain_identity_genus_one():
    report = chain_verify(expand(quartic_element(), 4), 20)
    assert report.passed
    assert len(report.edges) == 4
    assert report.max_residual < report.tolerance


def test_genus_two_cube_roots_of_unity():
    h = sextic_element()
    root = root_state(h)
    w = mp.expjpi(mp.mpf(2) / 3)
    assert len(root.spare_roots) == 2
    assert any(close_to(r, w) for r in root.spare_roots)
    assert any(close_to(r, mp.conj(w)) for r in root.spare_roots)
    for j in (1, 2):
        child = cf_step(h, root, j)
        assert close_to(child.sqrt_y, -root.A(child.t))
        assert close_to(child.sqrt_y ** 2, h.X(child.t))


def test_genus_two_full_tree():
    tree = expand(sextic_element(), 3)
    assert len(tree) == 15
    for path, state in tree.nodes.items():
        if len(path) < 3:
            assert len(tree.children(path)) == 2
    assert chain_verify(tree, 24).passed


def test_generic_genus_two_reconstructs():
    X = generic_curve(2)
    h = element_from_point(X, mp.mpc("0.7", "0.2"))
    tree = expand(h, 3)
    assert chain_verify(tree, 24).passed
    for path in tree.maximal_paths():
        assert reconstruct_series(tree, path, 24) < tol()


def test_evaluate_path_matches_series():
    h = quartic_element()
    tree = expand(h, 3)
    value = evaluate_path(tree, (1, 1, 1), 12)
    assert close_to(value[0], mp.sqrt(2) - 1)


def test_explicit_path_policy():
    tree = expand(sextic_element(), 3, policy=(2, 1, 1))
    assert len(tree) == 4
    assert (2, 1, 1) in tree.nodes


def test_first_policy_follows_first_root():
    tree = expand(sextic_element(), 2, policy="first")
    assert sorted(tree.nodes) == [(), (1,), (1, 1)]


def test_unknown_policy():
    with pytest.raises(NoSuchChoice):
        expand(quartic_element(), 2, policy="some")


def test_no_such_choice():
    h = quartic_element()
    with pytest.raises(NoSuchChoice):
        cf_step(h, root_state(h), 2)


def test_degenerate_leading_coefficient():
    # X - A^2 = 2 s^3 (s - 1) so B is the constant 2
    h = element_from_point(Poly.of(1, 0, 0, 0, 2, 0, 1), 1, 2)
    root = root_state(h)
    assert root.kind == DEGENERATE
    assert "deg_B_below_genus" in root.flags
    with pytest.raises(DegenerateB):
        cf_step(h, root, 1)
    assert len(expand(h, 3)) == 1


def test_tree_serialisation():
    doc = tree_to_dict(expand(quartic_element(), 2))
    assert doc["precision_bits"] == 256
    assert doc["genus"] == 1
    assert set(doc["nodes"]) == {"", "1", "1.1"}
    node = doc["nodes"]["1"]
    assert node["kind"] == REGULAR
    assert node["alpha"] is not None and node["beta"] is not None
    assert path_key((2, 1, 3)) == "2.1.3"
