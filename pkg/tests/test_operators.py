import numpy as np
import pytest

from ucme.domain import (
    DomainConfig,
    destruction,
    evaluate,
    generate_initial,
    mutate,
    repair,
)
from ucme.domain.evaluate import room_fragmentation, tessellation_of
from ucme.domain.operators import (
    DELETE_OPENINGS,
    DELETE_ROOM,
    ERODE,
    JITTER_SUBSET,
    SAFE_EXPAND,
    SHIFT_ALL,
    UNSAFE_EXPAND,
    placement_order,
)

CFG = DomainConfig(sites=70)


@pytest.fixture(scope="module")
def parent(studio):
    g = generate_initial(studio, np.random.default_rng(2), CFG)
    assert len(g.rooms_present()) == 3
    return g


def test_placement_order_by_degree(apartment):
    order = [u.id for u in placement_order(apartment)]
    assert order[0] == 1   # the hub room goes first
    degrees = [apartment.degree(u) for u in order]
    assert degrees == sorted(degrees, reverse=True)


def test_generate_is_deterministic(studio):
    a = generate_initial(studio, np.random.default_rng(5), CFG)
    b = generate_initial(studio, np.random.default_rng(5), CFG)
    assert np.array_equal(a.sites, b.sites)
    assert np.array_equal(a.assignment, b.assignment)
    assert a.openings == b.openings


def test_generate_partition(studio, parent):
    # every assigned cell belongs to exactly one room id from the spec
    ids = set(studio.unit_ids) | {-1}
    assert set(parent.assignment.tolist()) <= ids


def test_shift_all_preserves_count_and_bounds(studio, parent, rng):
    child = destruction(parent, SHIFT_ALL, studio, rng, CFG)
    assert len(child.sites) == len(parent.sites)
    assert (child.sites[:, 0] >= 0).all()
    assert (child.sites[:, 0] <= studio.width).all()
    assert not np.array_equal(child.sites, parent.sites)
    assert np.array_equal(child.assignment, parent.assignment)


def test_jitter_moves_a_small_subset(studio, parent, rng):
    child = destruction(parent, JITTER_SUBSET, studio, rng, CFG)
    moved = (~np.isclose(child.sites, parent.sites).all(axis=1)).sum()
    assert 1 <= moved <= max(1, round(0.10 * len(parent.sites)))


def test_delete_room_removes_one_room(studio, parent, rng):
    child = destruction(parent, DELETE_ROOM, studio, rng, CFG)
    assert len(child.rooms_present()) == len(parent.rooms_present()) - 1
    gone = set(parent.rooms_present()) - set(child.rooms_present())
    assert len(gone) == 1
    room = gone.pop()
    assert all(room not in o.rooms for o in child.openings)


def test_expand_variants(studio, parent, rng):
    unsafe = destruction(parent, UNSAFE_EXPAND, studio,
                         np.random.default_rng(3), CFG)
    safe = destruction(parent, SAFE_EXPAND, studio,
                       np.random.default_rng(3), CFG)
    # safe expansion never takes cells away from other rooms
    for room in parent.rooms_present():
        before = set(parent.cells_of(room).tolist())
        after = set(safe.cells_of(room).tolist())
        assert before <= after or len(after) > len(before) or before == after
    grew_unsafe = (unsafe.assignment != parent.assignment).sum()
    assert grew_unsafe >= 1


def test_erode_keeps_rooms_connected(studio, parent):
    tess = tessellation_of(parent, studio, CFG)
    for seed in range(6):
        child = destruction(parent, ERODE, studio,
                            np.random.default_rng(seed), CFG)
        frags, _ = room_fragmentation(tess, child.assignment, 0.0)
        for room, count in frags.items():
            assert count == 1, f"room {room} split by erosion"


def test_delete_openings_thins_the_list(studio, parent):
    child = destruction(parent, DELETE_OPENINGS, studio,
                        np.random.default_rng(8), CFG)
    assert len(child.openings) <= len(parent.openings)
    assert set(child.openings) <= set(parent.openings)


def test_mutate_reproducible_and_nondestructive(studio, parent):
    sites_before = parent.sites.copy()
    a = mutate(parent, studio, np.random.default_rng(21), CFG)
    b = mutate(parent, studio, np.random.default_rng(21), CFG)
    assert np.array_equal(a.sites, b.sites)
    assert np.array_equal(a.assignment, b.assignment)
    assert a.openings == b.openings
    assert np.array_equal(parent.sites, sites_before)


def test_mutate_output_is_valid(studio, parent):
    for seed in range(8):
        child = mutate(parent, studio, np.random.default_rng(seed), CFG)
        # sites stay pairwise distinct and in bounds
        d = child.sites[:, None, :] - child.sites[None, :, :]
        dist = np.abs(d).max(axis=2)
        np.fill_diagonal(dist, 1.0)
        assert dist.min() > 1e-7
        # openings reference existing edges incident to their rooms
        tess = tessellation_of(child, studio, CFG)
        for o in child.openings:
            eid = tess.edge_id_of(o.edge)
            assert eid is not None
            cells = tess.edge_cells[eid]
            incident_rooms = {int(child.assignment[c])
                              for c in cells if c >= 0}
            assert set(o.rooms) <= incident_rooms


def test_repair_replaces_missing_rooms(studio, parent, rng):
    broken = destruction(parent, DELETE_ROOM, studio,
                         np.random.default_rng(4), CFG)
    fixed = repair(broken, studio, rng, CFG)
    assert len(fixed.rooms_present()) == 3


def test_repair_reconnects_fragments(studio, parent):
    tess = tessellation_of(parent, studio, CFG)
    fixed = repair(parent, studio, np.random.default_rng(6), CFG)
    frags, _ = room_fragmentation(tess, fixed.assignment, 0.0)
    assert all(count == 1 for count in frags.values())


def test_repair_is_near_fixed_point_on_good_layouts(studio):
    # run a few mutations to reach a repaired state, then repair again:
    # room geometry must not change (openings may be re-validated)
    g = generate_initial(studio, np.random.default_rng(9), CFG)
    g = mutate(g, studio, np.random.default_rng(10), CFG)
    again = repair(g, studio, np.random.default_rng(11), CFG)
    assert np.array_equal(again.assignment, g.assignment)


def test_mutation_improves_reachability(studio):
    # smoke: repeated mutate+evaluate never crashes and keeps scores sane
    g = generate_initial(studio, np.random.default_rng(12), CFG)
    rng = np.random.default_rng(13)
    for _ in range(10):
        g = mutate(g, studio, rng, CFG)
        ev = evaluate(g, studio, CFG)
        assert 0.0 <= ev.feasibility_score <= 1.0
