import csv
import io
import json

import pytest

from spheremaps.bounds import (
    BASE_WITNESSES,
    QBound,
    emit_table,
    m_bound,
    q_bounds,
    q_group,
    witness_id,
    witness_map,
    wood_obstruction,
)
from spheremaps.sphere_maps import is_constant, verify_sphere_map

# q(n) for n = 2..47 as tabulated in the source article
PUBLISHED_Q = {n: 2 if n < 4 else 4 if n < 8 else 8 if n < 16 else 16 if n < 32 else 32 for n in range(2, 48)}


def test_wood_examples():
    assert wood_obstruction(4, 3)
    assert not wood_obstruction(3, 2)
    assert wood_obstruction(48, 31)
    assert not wood_obstruction(48, 32)
    with pytest.raises(ValueError):
        wood_obstruction(4, 4)
    with pytest.raises(ValueError):
        wood_obstruction(4, 0)


def test_wood_matches_brute_force():
    for n in range(2, 70):
        for r in range(1, n):
            brute = any(k & (k - 1) == 0 for k in range(r + 1, n + 1))
            assert wood_obstruction(n, r) == brute


@pytest.mark.parametrize("n", range(2, 48))
def test_q_table_matches_published_values(n):
    qb = q_bounds(n)
    assert qb.exact and qb.value == PUBLISHED_Q[n]


def test_q_specific_examples():
    assert q_bounds(7).as_tuple() == (4, 4, True)
    assert q_bounds(7).witness == "hopf_S7_S4"
    assert q_bounds(31).as_tuple() == (16, 16, True)
    q48 = q_bounds(48)
    assert (q48.lower, q48.upper, q48.exact) == (32, 48, False)
    assert q48.value is None


def test_lower_bound_invariants():
    prev = 0
    for n in range(2, 80):
        qb = q_bounds(n)
        assert qb.lower > n / 2
        assert qb.lower % 2 == 0
        assert qb.lower >= prev
        assert qb.lower <= qb.upper <= n
        prev = qb.lower


def test_powers_of_two_are_exact():
    for k in range(1, 7):
        qb = q_bounds(2**k)
        assert qb.exact and qb.value == 2**k


def test_provenance_tags():
    assert "witness" in q_bounds(20).provenance
    assert "identity" in q_bounds(16).provenance
    assert "wood" in q_bounds(16).provenance
    assert "even" in q_bounds(3).provenance or "monotone" in q_bounds(3).provenance


def test_qbound_validation():
    with pytest.raises(ValueError):
        QBound(3, 4, 2)
    with pytest.raises(ValueError):
        q_bounds(0)


def test_q_group_examples():
    assert q_group(3, "SO").as_tuple() == (3, 3, True)
    assert q_group(7, "U").as_tuple() == (3, 3, True)
    assert q_group(7, "SU").as_tuple() == (3, 3, True)
    assert q_group(2, "GrR(3)").as_tuple() == (4, 4, True)
    assert q_group(12, "GrC(5)").as_tuple() == (6, 6, True)
    assert not q_group(48, "SO").exact
    with pytest.raises(ValueError):
        q_group(1, "SO")
    with pytest.raises(ValueError):
        q_group(4, "Sp")


def test_m_bounds():
    assert m_bound(15, "R") == (4, 4)
    assert m_bound(2, "C") == (1, 1)
    assert m_bound(4, "R") == (3, 3)
    for n in range(2, 4):
        assert m_bound(n, "R") == (2, 2)
    for n in range(4, 16):
        assert m_bound(n, "C") == (2, 2)
    lo, hi = m_bound(48, "R")
    assert lo < hi
    with pytest.raises(ValueError):
        m_bound(5, "H")


def test_m_formulas_against_floats():
    import math

    for q in range(1, 200):
        from spheremaps.bounds import _m_real

        assert _m_real(q) == math.floor((1 + math.sqrt(1 + 8 * q)) / 2)
        assert math.isqrt(q) == math.floor(math.sqrt(q))


def test_witness_ids_and_small_witnesses():
    assert witness_id(3) == "hopf_S3_S2"
    assert witness_id(10) == "hopf_S15_S8|S10"
    assert witness_id(8) == "identity_S8"
    for n in (3, 5, 10, 17):
        F = witness_map(q_bounds(n).witness)
        assert (F.source_dim, F.target_dim) == (n, q_bounds(n).upper)
        assert verify_sphere_map(F).passed and not is_constant(F)
    with pytest.raises(KeyError):
        witness_map("nonsense")


def test_base_witness_dimensions():
    for name, (src, tgt, _) in BASE_WITNESSES.items():
        assert f"S{src}" in name and f"S{tgt}" in name


def test_table_formats():
    text = emit_table(15)
    assert text.splitlines()[7].split()[:2] == ["8", "8"]
    rows = json.loads(emit_table(15, "json"))
    assert [r["q_lower"] for r in rows if r["n"] in (2, 3)] == [2, 2]
    assert all(r["exact"] for r in rows)
    assert rows[6]["witness_id"] == "identity_S8"
    parsed = list(csv.DictReader(io.StringIO(emit_table(15, "csv"))))
    assert parsed[-1]["n"] == "15" and parsed[-1]["q_upper"] == "8"
    assert emit_table(15, "json") == emit_table(15, "json")
    with pytest.raises(ValueError):
        emit_table(1)
    with pytest.raises(ValueError):
        emit_table(5, "xml")


def test_inexact_rows_show_intervals():
    rows = json.loads(emit_table(48, "json"))
    last = rows[-1]
    assert last["n"] == 48 and not last["exact"]
    assert last["q_SO"] == [33, 49]
