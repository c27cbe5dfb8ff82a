import json

import pytest

from presentations.rspresent import (CosetSystem, MissingInverseWitness, Presentation, UnknownSymbol,
                                     brute_force_monoid, check_inverse_witnesses, check_soundness,
                                     cyclic_toy, det_parity_system, determinant_kernel, dihedral_toy,
                                     level_model, level_presentation, load_presentation_file, rs_present,
                                     save_presentation, schreier_generators, translate)
from subgroups.tables import BudgetExceeded


def test_cyclic_kernel_has_two_elements():
    p, cs, model = cyclic_toy()
    kp = rs_present(p, cs)
    assert kp.presentation.generators == ["a@1"]
    assert kp.presentation.relations == [(("a@1", "a@1"), ())]
    assert kp.eliminated == ["a@0"]
    assert brute_force_monoid(kp.presentation).order == 2
    assert check_soundness(kp, cs, model).passed


def test_oracle_agrees_with_the_congruence_enumeration():
    p, cs, model = cyclic_toy()
    by_relations = brute_force_monoid(p)
    by_model = brute_force_monoid(p, model=model)
    assert by_relations.order == by_model.order == 4
    kernel = [w for w in by_model.words if cs.coset_of(w) == 0]
    assert len(kernel) == brute_force_monoid(rs_present(p, cs).presentation).order


def test_dihedral_kernel():
    p, cs, model = dihedral_toy()
    kp = rs_present(p, cs)
    assert kp.presentation.generators == ["b@0", "b@1"]
    assert kp.presentation.relations == [(("b@0", "b@1"), ()), (("b@1", "b@0"), ())]
    assert kp.expand(("b@0",)) == ("b", "a")
    assert check_soundness(kp, cs, model).passed


def test_without_elimination_every_schreier_generator_survives():
    p, cs, _ = dihedral_toy()
    kp = rs_present(p, cs, eliminate=False)
    assert len(kp.presentation.generators) == 4
    assert kp.raw_relations == len(kp.presentation.relations)


def test_infinite_monoid_hits_the_budget():
    p, _, _ = dihedral_toy()
    with pytest.raises(BudgetExceeded):
        brute_force_monoid(p, budget=10)


def test_translate_tracks_the_coset():
    _, cs, _ = dihedral_toy()
    assert translate(("a", "b", "a"), 0, cs) == ("a@0", "b@1", "a@0")


def test_coset_system_validation():
    with pytest.raises(ValueError):
        CosetSystem(2, {"a": 1}, [("a",), ()])
    with pytest.raises(ValueError):
        CosetSystem(2, {"a": 1}, [(), ("a", "a")])
    cs = CosetSystem(2, {"a": 1}, [(), ("a",)])
    with pytest.raises(MissingInverseWitness):
        cs.inverse(("a",))


def test_undeclared_symbols_are_rejected():
    with pytest.raises(UnknownSymbol):
        Presentation(["a"], [(("a", "b"), ())])


def test_relations_must_respect_the_grading():
    p = Presentation(["a"], [(("a",), ())])
    cs = CosetSystem(2, {"a": 1}, [(), ("a",)], {"a": ("a",)})
    with pytest.raises(ValueError):
        rs_present(p, cs)


def test_level_kernel_has_two_schreier_generators_per_generator():
    assert len(schreier_generators(level_presentation(8), det_parity_system(8))) == 128


def test_level_inverse_witnesses():
    assert check_inverse_witnesses(det_parity_system(3), level_model(3)) == []


def test_determinant_kernel_is_sound_on_a_sample():
    report = determinant_kernel(3, sample_size=25, seed=5)
    assert report.schreier_generators == 18
    assert report.soundness.passed
    assert report.to_dict()["soundness"]["checked_relations"] == 25


def test_presentation_file_round_trip(tmp_path):
    path = tmp_path / "z4.json"
    path.write_text(json.dumps({"generators": ["a"], "relations": [[["a", "a", "a", "a"], []]],
                                "grading": {"a": 1}}), encoding="utf-8")
    p, cs = load_presentation_file(path)
    assert cs.representatives == [(), ("a",)]
    assert cs.inverse_witnesses == {"a": ("a", "a", "a")}

    kp = rs_present(p, cs)
    out = save_presentation(kp, tmp_path / "kernel.json")
    loaded, no_grading = load_presentation_file(out)
    assert no_grading is None
    assert loaded.generators == kp.presentation.generators
    assert loaded.relations == kp.presentation.relations
