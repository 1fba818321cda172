import math
import os

import numpy as np
import pytest

from certify import LEFT, stability_length, stability_witness, intersection_check
from errors import ContractViolation
from gallery import (BUILTIN_NAMES, FAIL, PASS, SKIPPED, GalleryEntry,
                     block_triangular, builtin, constant_tensor,
                     default_entries, dicke, domain_wall, export_entries,
                     gen_dw, gen_dw_property_test, gen_w, gen_w_property_test,
                     random_disjoint_pair, run_all, w_general, w_state)
from hamiltonian import verify_ground_equals_mps
from models import load_tensor
from mps import MpsTensor


@pytest.fixture(scope="module")
def gallery_records():
    return run_all(7)


def test_gallery_passes_at_seven(gallery_records):
    failed = [r for r in gallery_records if r.status == FAIL]
    assert not failed, "\n".join(f"{r.entry}: {r.check}: {r.detail}" for r in failed)


def test_gallery_covers_every_default_entry(gallery_records):
    labels = {r.entry for r in gallery_records}
    assert labels == {e.label for e in default_entries()}


def test_gallery_records_are_sorted(gallery_records):
    entries = [r.entry for r in gallery_records]
    assert entries == sorted(entries)


def test_gallery_short_chains_are_skipped_not_failed():
    records = run_all(3)
    assert not [r for r in records if r.status == FAIL]
    skipped = [r for r in records if r.status == SKIPPED]
    assert any(r.entry == "domain_wall" and "n=4" in r.check for r in skipped)


def test_gallery_workers_do_not_change_results():
    entries = [builtin("w_state"), builtin("domain_wall"), builtin("afm_ising")]
    serial = run_all(5, entries)
    threaded = run_all(5, entries, workers=3)
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in threaded]


def test_gallery_detects_perturbed_w_state():
    clean = builtin("w_state")
    noise = np.random.default_rng(1).standard_normal((2, 2, 2)) * 1e-3
    noisy = GalleryEntry("noisy_w", MpsTensor(clean.tensor.matrices + noise), clean.expected)
    records = run_all(7, [noisy])
    failed = {r.check for r in records if r.status == FAIL}
    assert "stability left j=1" in failed
    assert "witness left j=1" in failed
    assert any(check.startswith("intersection k=") for check in failed)


def test_builtin_parameters():
    entry = builtin("dicke", D=4)
    assert entry.label == "dicke(D=4)"
    assert stability_length(entry.tensor, LEFT, 5).j == 3
    assert builtin("w_momentum", p=1.0).params == {"p": 1.0}


def test_builtin_errors():
    with pytest.raises(ContractViolation):
        builtin("mystery")
    with pytest.raises(ContractViolation):
        builtin("w_state", D=3)
    with pytest.raises(ContractViolation):
        builtin("dicke", D=1)


def test_builtin_names_cover_constructors():
    assert {"w_state", "dicke", "counterexample_c", "aklt", "nilpotent_aklt"} <= set(BUILTIN_NAMES)


def test_builtin_examples():
    assert stability_witness(builtin("w_state").tensor, 1, LEFT) is not None
    assert not intersection_check(builtin("counterexample_c").tensor, 3).holds


def test_w_general_requires_independent_vectors():
    with pytest.raises(ContractViolation):
        w_general((1, 1), (2, 2))
    assert w_general((1, 0), (0, 1)).D == 2


def test_gen_dw_of_constants_is_domain_wall():
    C = gen_dw(constant_tensor([1, 0]), constant_tensor([0, 1]))
    np.testing.assert_allclose(C.matrices, domain_wall().matrices)


def test_gen_w_of_constants_is_w_state():
    C = gen_w(constant_tensor([1, 0]), constant_tensor([0, 1]))
    np.testing.assert_allclose(C.matrices, w_state().matrices)


def test_block_triangular_shape_checks():
    A = dicke(3)
    with pytest.raises(ContractViolation):
        block_triangular(A, np.zeros((2, 3, 2)), A)
    C = block_triangular(A, np.zeros((2, 3, 3)), A)
    assert C.D == 6


def test_export_entries(tmp_path):
    entries = [builtin("w_state"), builtin("dicke", D=4)]
    paths = export_entries(str(tmp_path), entries)
    assert [os.path.basename(p) for p in paths] == ["w_state.json", "dicke_D_4.json"]
    for entry, path in zip(entries, paths):
        np.testing.assert_allclose(load_tensor(path).matrices, entry.tensor.matrices)

# =============================================================================
# Generalized W and domain-wall families
# =============================================================================

def test_gen_dw_constants_domain_wall_phenomenology():
    A, B = constant_tensor([1, 0]), constant_tensor([0, 1])
    outcome = gen_dw_property_test(A, B, kmax=5, nmax=6)
    assert outcome.status == PASS, outcome.failures
    r = verify_ground_equals_mps(gen_dw(A, B), 3, 5)
    assert r.gs_dim == 3


def test_gen_dw_skips_overlapping_supports():
    A = constant_tensor([1, 0])
    outcome = gen_dw_property_test(A, A, kmax=4, nmax=4)
    assert outcome.status == SKIPPED
    assert "intersect" in outcome.reason


@pytest.mark.slow
@pytest.mark.parametrize("seed", [3, 17])
def test_gen_dw_random_pairs(seed):
    A, B = random_disjoint_pair(seed)
    outcome = gen_dw_property_test(A, B, kmax=6, nmax=4)
    assert outcome.status == PASS, outcome.failures


@pytest.mark.parametrize("seed", [5, 23])
def test_gen_w_random_pairs(seed):
    A, B = random_disjoint_pair(seed)
    outcome = gen_w_property_test(A, B, k=3, nmax=4)
    assert outcome.status == PASS, outcome.failures


def test_gen_w_requires_intersection_of_a():
    A, B = random_disjoint_pair(5)
    outcome = gen_w_property_test(A, B, k=2, nmax=3)
    assert outcome.status == SKIPPED


def test_random_disjoint_pair_supports():
    A, B = random_disjoint_pair(9, D=3)
    assert (A.d, A.D) == (4, 3)
    assert not np.any(A.matrices[2:]) and not np.any(B.matrices[:2])


def test_w_momentum_label_formats_float():
    assert builtin("w_momentum", p=2 * math.pi / 5).label == "w_momentum(p=1.257)"
