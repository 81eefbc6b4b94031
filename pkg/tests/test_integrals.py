import numpy as np
import pytest

from qres.errors import ConsistencyError, IndexOutOfRangeError, ParseError
from qres.integrals import (
    assemble_fermionic_hamiltonian,
    parse_fcidump,
    serialize_fcidump,
)
from qres.pauli import expectation, jordan_wigner
from qres.states import hf_state

from conftest import SMALL_CELLS, cell, dense_fermionic, fixture_text

ONE_ORBITAL = """ &FCI NORB=1,NELEC=2,MS2=0,
 &END
-1.25 1 1 0 0
"""


def test_one_orbital_file():
    ints = parse_fcidump(ONE_ORBITAL)
    assert ints.n_spin_orbitals == 2
    assert ints.h[0, 0] == pytest.approx(-1.25)
    assert ints.h[1, 1] == pytest.approx(-1.25)
    assert np.all(ints.g == 0)


def test_out_of_range_index():
    bad = " &FCI NORB=4,NELEC=2,MS2=0,\n &END\n1.0 5 1 1 1\n"
    with pytest.raises(IndexOutOfRangeError):
        parse_fcidump(bad)


def test_malformed_header():
    with pytest.raises(ParseError):
        parse_fcidump("NORB=2\n1.0 1 1 0 0\n")
    with pytest.raises(ParseError):
        parse_fcidump(" &FCI NELEC=2,\n &END\n")


def test_conflicting_duplicates():
    bad = " &FCI NORB=2,NELEC=2,MS2=0,\n &END\n1.0 1 2 0 0\n2.0 2 1 0 0\n"
    with pytest.raises(ConsistencyError):
        parse_fcidump(bad)


def test_consistent_duplicates_accepted():
    ok = " &FCI NORB=2,NELEC=2,MS2=0,\n &END\n1.0 1 2 0 0\n1.0 2 1 0 0\n"
    ints = parse_fcidump(ok)
    assert ints.h[0, 2] == pytest.approx(1.0)


def test_h2_ground_state_energy(h2):
    e0, _ = h2.ground
    assert e0 == pytest.approx(-1.137, abs=1e-3)


def test_assembled_operator_is_hermitian(h2):
    dense = dense_fermionic(assemble_fermionic_hamiltonian(h2.ints))
    assert np.allclose(dense, dense.conj().T, atol=1e-12)


def test_core_only_operator():
    from qres.integrals import FermionicOperator

    op = FermionicOperator(2, np.zeros((2, 2)), np.zeros((2,) * 4), 5.0)
    vals = np.linalg.eigvalsh(dense_fermionic(op))
    assert np.allclose(vals, 5.0)


@pytest.mark.parametrize("name", ["h4_chain_eq", "h2o_eq"])
def test_roundtrip_parse_serialize_parse(name):
    ints = parse_fcidump(fixture_text(name))
    again = parse_fcidump(serialize_fcidump(ints))
    assert np.max(np.abs(again.h - ints.h)) < 1e-12
    assert np.max(np.abs(again.g - ints.g)) < 1e-12
    assert again.e_core == pytest.approx(ints.e_core, abs=1e-12)
    assert again.n_electrons == ints.n_electrons
    assert again.reference_kind == ints.reference_kind


@pytest.mark.parametrize("name", SMALL_CELLS)
def test_hf_expectation_matches_generator(name):
    c = cell(name)
    hf = hf_state(c.ints.n_spin_orbitals, c.ints.n_electrons)
    e_hf = expectation(c.hq, hf)
    assert e_hf == pytest.approx(c.meta["scf_energy_hartree"], abs=1e-6)


def test_tensor_invariants_enforced():
    ints = parse_fcidump(ONE_ORBITAL)
    broken = ints.h.copy()
    broken[0, 1] = 0.5  # asymmetric and spin-coupling
    from qres.integrals import SpinOrbitalIntegrals

    with pytest.raises(ConsistencyError):
        SpinOrbitalIntegrals(2, 2, broken, ints.g, 0.0, "restricted")
