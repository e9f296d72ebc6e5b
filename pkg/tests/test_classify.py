"""Bound tables, verdicts, and the three-party reference table."""

from __future__ import annotations

import pytest

from bellpoly import classify as C
from bellpoly import models as M
from bellpoly import polynomial as P
from bellpoly.classify import ModelKind, Root2Power
from bellpoly.errors import (
    InconsistentInputError,
    InvalidArgumentError,
    NotTabulatedError,
    NumericalIntegrityError,
)

from conftest import SQRT2


class TestRoot2Power:
    def test_values(self):
        assert float(Root2Power(0)) == 1.0
        assert float(Root2Power(1)) == pytest.approx(SQRT2)
        assert float(Root2Power(2)) == 2.0
        assert float(Root2Power(3)) == pytest.approx(2 * SQRT2)
        assert float(Root2Power(4)) == 4.0

    def test_render(self):
        assert Root2Power(0).render() == "1"
        assert Root2Power(1).render() == "sqrt(2)"
        assert Root2Power(2).render() == "2"
        assert Root2Power(3).render() == "2*sqrt(2)"
        assert Root2Power(4).render() == "4"

    def test_product(self):
        assert Root2Power(1) * Root2Power(2) == Root2Power(3)

    def test_ordering(self):
        assert Root2Power(0) < Root2Power(1) < Root2Power(2)

    def test_negative_rejected(self):
        with pytest.raises(InvalidArgumentError):
            Root2Power(-1)


class TestModelKind:
    def test_constructors(self):
        assert ModelKind.local().kind == "local"
        assert ModelKind.hybrid_separable(2).param == 2
        assert ModelKind.quantum_depth(3).render() == "quantum-depth(m=3)"

    def test_validation(self):
        with pytest.raises(InvalidArgumentError):
            ModelKind("nonsense")
        with pytest.raises(InvalidArgumentError):
            ModelKind("hybrid")  # needs a parameter
        with pytest.raises(InvalidArgumentError):
            ModelKind("local", 1)  # takes none


class TestMkBound:
    def test_quantum_depth_examples(self):
        assert C.mk_bound(4, ModelKind.quantum_depth(4)) == Root2Power(3)  # 2*sqrt(2)
        assert C.mk_bound(4, ModelKind.quantum_depth(2)) == Root2Power(1)  # sqrt(2)

    def test_local_and_algebraic(self):
        assert C.mk_bound(5, ModelKind.local()) == Root2Power(0)
        assert C.mk_bound(4, ModelKind.algebraic()) == Root2Power(4)
        assert C.mk_bound(5, ModelKind.algebraic()) == Root2Power(4)

    def test_hybrid_tabulated(self):
        assert C.mk_bound(3, ModelKind.hybrid_separable(1)) == Root2Power(2)
        assert C.mk_bound(4, ModelKind.hybrid_separable(2)) == Root2Power(2)

    def test_hybrid_not_tabulated_beyond_four(self):
        with pytest.raises(NotTabulatedError) as err:
            C.mk_bound(5, ModelKind.hybrid_separable(2))
        assert "hybrid_bound_all" in str(err.value)

    def test_parameter_ranges(self):
        with pytest.raises(InvalidArgumentError):
            C.mk_bound(3, ModelKind.quantum_depth(4))
        with pytest.raises(InvalidArgumentError):
            C.mk_bound(3, ModelKind.hybrid_separable(3))


class TestSvetlichnyBounds:
    def test_three_parties(self):
        table = C.svetlichny_bounds(3)
        assert table.bounds[ModelKind.hybrid_separable(1)] == Root2Power(0)
        assert table.bounds[ModelKind.quantum_depth(3)] == Root2Power(1)
        assert table.bounds[ModelKind.algebraic()] == Root2Power(2)

    def test_four_parties(self):
        table = C.svetlichny_bounds(4)
        assert table.bounds[ModelKind.hybrid_separable(1)] == Root2Power(2)
        assert table.bounds[ModelKind.hybrid_separable(2)] == Root2Power(2)
        assert table.bounds[ModelKind.quantum_depth(4)] == Root2Power(3)
        assert table.bounds[ModelKind.algebraic()] == Root2Power(4)

    def test_five_parties(self):
        table = C.svetlichny_bounds(5)
        assert table.bounds[ModelKind.hybrid_separable(2)] == Root2Power(2)
        assert table.bounds[ModelKind.quantum_depth(5)] == Root2Power(3)

    def test_invalid_n(self):
        with pytest.raises(InvalidArgumentError):
            C.svetlichny_bounds(2)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_threshold_matches_enumeration(self, n):
        table = C.svetlichny_bounds(n)
        stored = float(table.bounds[ModelKind.hybrid_separable(1)])
        computed = M.hybrid_bound_all(P.svetlichny(n)).overall.value
        assert computed == stored

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_sqrt2_gap(self, n):
        table = C.svetlichny_bounds(n)
        hybrid = table.bounds[ModelKind.hybrid_separable(1)]
        quantum = table.bounds[ModelKind.quantum_depth(n)]
        assert quantum.half_exponent == hybrid.half_exponent + 1


class TestDepthVerdict:
    def test_above_sqrt2_gives_three_particle(self):
        v = C.entanglement_depth_verdict(1.8, 3)
        assert v.depth == 3
        assert v.conclusion == "at least 3-particle entanglement"
        assert v.threshold == Root2Power(1)
        assert v.margin == pytest.approx(1.8 - SQRT2)

    def test_at_local_bound_gives_nothing(self):
        v = C.entanglement_depth_verdict(1.0, 3)
        assert v.depth is None
        assert v.conclusion == "no conclusion"

    def test_between_one_and_sqrt2(self):
        v = C.entanglement_depth_verdict(1.2, 3)
        assert v.depth == 2
        assert v.threshold == Root2Power(0)
        assert v.margin == pytest.approx(0.2)

    def test_monotone_in_value(self):
        depths = []
        for value in (0.5, 1.0, 1.2, 1.5, 1.9, 2.0):
            v = C.entanglement_depth_verdict(value, 3)
            depths.append(0 if v.depth is None else v.depth)
        assert depths == sorted(depths)

    def test_depth_capped_at_n(self):
        # beyond the full quantum maximum but below the algebraic limit
        v = C.entanglement_depth_verdict(3.9, 4)
        assert v.depth == 4

    def test_tolerance_guard(self):
        # a hair above the threshold stays at the weaker conclusion
        v = C.entanglement_depth_verdict(1.0 + 5e-10, 3)
        assert v.depth is None

    def test_inconsistent_value(self):
        with pytest.raises(InconsistentInputError):
            C.entanglement_depth_verdict(2.1, 3)

    def test_negative_value(self):
        with pytest.raises(InvalidArgumentError):
            C.entanglement_depth_verdict(-0.5, 3)


class TestNonseparabilityVerdict:
    def test_sqrt2_is_genuine_for_three(self):
        v = C.nonseparability_verdict(SQRT2, 3)
        assert v.genuine_nonseparable is True
        assert v.margin == pytest.approx(SQRT2 - 1.0)
        assert v.conclusion == "genuine 3-party non-separability"

    def test_at_the_hybrid_bound(self):
        v = C.nonseparability_verdict(1.0, 3)
        assert v.genuine_nonseparable is False
        assert "not established" in v.conclusion

    def test_four_party_example(self):
        v = C.nonseparability_verdict(2.5, 4)
        assert v.genuine_nonseparable is True
        assert v.threshold == Root2Power(2)
        assert v.margin == pytest.approx(0.5)

    def test_inconsistent_value(self):
        with pytest.raises(InconsistentInputError):
            C.nonseparability_verdict(2.2, 3)


class TestBoundTable:
    def test_monotonicity_enforced(self):
        with pytest.raises(InvalidArgumentError):
            C.BoundTable(
                family="mk",
                n=3,
                bounds={
                    ModelKind.local(): Root2Power(2),
                    ModelKind.hybrid_separable(1): Root2Power(0),
                },
            )

    def test_depth_monotonicity_enforced(self):
        with pytest.raises(InvalidArgumentError):
            C.BoundTable(
                family="mk",
                n=3,
                bounds={
                    ModelKind.quantum_depth(1): Root2Power(2),
                    ModelKind.quantum_depth(2): Root2Power(0),
                },
            )

    def test_serialization(self):
        data = C.svetlichny_bounds(3).as_dict()
        assert data["family"] == "svetlichny"
        assert any(entry["exact"] == "sqrt(2)" for entry in data["bounds"])


class TestTable1:
    def test_rows(self):
        report = C.table1(restarts=8, seed=0x5EED)
        rows = report.rows()
        stored = {
            "M3": ["1", "sqrt(2)", "2", "2", "2"],
            "S3": ["1", "1", "1", "sqrt(2)", "2"],
            "product": ["1", "sqrt(2)", "2", "2*sqrt(2)", "4"],
        }
        for row, expected in stored.items():
            got = [rows[row][c].stored.render() for c in C.TABLE1_COLUMNS]
            assert got == expected

    def test_classical_cells_bit_exact(self):
        report = C.table1(restarts=8, seed=0x5EED)
        for cell in report.cells:
            if cell.tolerance == 0.0:
                assert cell.recomputed == float(cell.stored)
            else:
                assert abs(cell.recomputed - float(cell.stored)) <= cell.tolerance

    def test_corrupt_cell_detected(self):
        with pytest.raises(NumericalIntegrityError) as err:
            C.table1(restarts=4, seed=0x5EED, _corrupt_cell="M3:local")
        assert "M3:local" in str(err.value)

    def test_corrupt_quantum_cell_detected(self):
        with pytest.raises(NumericalIntegrityError) as err:
            C.table1(restarts=4, seed=0x5EED, _corrupt_cell="S3:quantum_depth_3")
        assert "S3:quantum_depth_3" in str(err.value)

    def test_render_text_shape(self):
        report = C.table1(restarts=8, seed=0x5EED)
        lines = report.render_text().splitlines()
        assert len(lines) == 5  # header, three rows, verification line
        assert lines[1].startswith("M3")
        assert "verified" in lines[-1]
