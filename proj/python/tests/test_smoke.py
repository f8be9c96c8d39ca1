import numpy as np
import pytest

import mirrorchain as mc


def kron_word(word):
    single = {
        "I": np.eye(2),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]]),
        "Z": np.diag([1.0, -1.0]).astype(complex),
    }
    out = np.eye(1)
    for c in word:
        out = np.kron(out, single[c])
    return out


def test_pauli_matrix_matches_numpy_kron():
    for word in ["XZ", "YIY", "ZZX"]:
        assert np.allclose(mc.pauli_matrix(word), kron_word(word))
    assert mc.pauli_product("X", "Y") == ("+i", "Z")


def test_closed_form_reconstructs_mirror_unitary():
    for n in range(2, 7):
        d = mc.closed_form(n)
        assert mc.unitary_fidelity(mc.reconstruct(d), mc.mirror_unitary(n)) >= 1 - 1e-9


def test_spectrum_and_transfer():
    assert mc.spectrum(5)["satisfied"]
    assert not mc.spectrum({"n": 3, "couplings": [1.0, 1.0], "fields": [0, 0, 0]})["satisfied"]
    report = mc.transfer_bell(5, (1, 2), "phi+")
    assert report["bell_output"] == "phi-"
    assert report["fidelity"] >= 1 - 1e-9
    assert mc.transfer_site(8, 1)["fidelity"] >= 1 - 1e-9


def test_decompose_round_trip():
    u = mc.mirror_unitary(4)
    result = mc.decompose(u)
    assert result["monotone"]
    assert mc.unitary_fidelity(mc.reconstruct(result["decomposition"]), u) >= 1 - 1e-9
    words = {f["word"] for f in result["decomposition"]["factors"]}
    assert len(words) == 4


def test_sector_phases_five_sites():
    p = mc.sector_phases(mc.mirror_unitary(5))
    assert abs(p[1] / p[0] - 1) < 1e-9
    assert abs(p[2] / p[0] + 1) < 1e-9


def test_grape_single_spin():
    system = {"n": 1, "shifts_hz": [0.0], "couplings_hz": [[0.0]], "channels": [[1]], "weights": [1.0]}
    summary, ax, ay = mc.grape(system, kron_word("X"), rf_scales=(1.0,))
    assert summary["fidelity"] >= 0.9999
    assert ax.shape == (20, 1)


def test_errors_are_typed():
    with pytest.raises(mc.DomainError):
        mc.closed_form(1)
    with pytest.raises(mc.ParseError):
        mc.pauli_matrix("XQ")
    with pytest.raises(mc.Error):
        mc.decompose(np.ones((2, 2)))
