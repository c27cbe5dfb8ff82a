"""
Acceptance runner for the toolkit.
Runs every acceptance check as a named, timed step inside a session
directory and collects a summary report.
"""

import time
import uuid
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from circuits.circuit import BASE_ALPHABET, K_PRIME, eval_expanded, eval_word, gate_matrix, random_word
from circuits.relations import (SYLLABLE_RULES, amalgam_relations, cs3_relations, definition_relations,
                                intro_relations, level_relations, level_token_matrix,
                                summarize_by_family, updown_relations, verify_relations,
                                worked_relations)
from exact.linalg import ExactMatrix
from exact.ring import ONE
from presentations.rspresent import brute_force_monoid, cyclic_toy, determinant_kernel, rs_present
from rewriting.normalizer import (almost_normalize, apply_syllable_rule, equiv_check, match_syllable_rule, refold,
                                  syllable_rules)
from rewriting.rewrite import (UnsoundRewrite, commute_rules, confluence_sample, get_rule_set, power_rules,
                               rewrite_fixpoint, trace_decreases)
from subgroups.amalgam import check_amalgam
from subgroups.factor import FACTOR_GROUPS, factor
from subgroups.membership import check_inclusions, is_clifford_cs3
from subgroups.monomial import word_monomial
from subgroups.normal_forms import (CNormal, CQDNormal, CQNormal, DNormal, EBlock, K0CDNormal,
                                    K0DNormal, PDNormal, PNormal, QDNormal, QNormal)
from subgroups.tables import GROUP_GENERATORS, SubgroupTables, enumerate_subgroup, get_tables
from utils.config import RunConfig
from utils.errors import Cs3Error
from utils.file_utils import get_file_utils
from utils.logger import get_logger, setup_session_logging

logger = get_logger(__name__)

EXPECTED_ORDERS = {"W": 6, "Q": 16, "C": 24, "CQ": 384, "D": 32768, "P": 40320}
MONOMIAL_GROUPS = ("Q", "C", "CQ", "D", "W", "P", "QD", "PD", "CQD")


class VerificationFailure(Cs3Error):
    """One or more acceptance steps failed"""


class AcceptanceSizes(BaseModel):
    """Sample sizes for the sampled checks; the defaults are the full suite."""

    random_tuples: int = Field(default=10_000, gt=0)
    member_words: int = Field(default=1_000, gt=0)
    member_word_length: int = Field(default=20, gt=0)
    normalizer_words: int = Field(default=500, gt=0)
    normalizer_max_length: int = Field(default=40, gt=0)
    rewrite_words: int = Field(default=200, gt=0)
    rewrite_word_length: int = Field(default=30, gt=0)
    det_words: int = Field(default=1_000, gt=0)
    rs_sample: int = Field(default=100, gt=0)
    level_max_n: int = Field(default=8, ge=2, le=16)
    exhaustive_p: bool = True

    @classmethod
    def quick(cls) -> "AcceptanceSizes":
        return cls(random_tuples=20, member_words=10, member_word_length=8, normalizer_words=5,
                   normalizer_max_length=12, rewrite_words=10, rewrite_word_length=12, det_words=20,
                   rs_sample=10, level_max_n=4, exhaustive_p=False)


def _relation_step(relations) -> Dict:
    results = verify_relations(relations)
    failed = [r.to_dict() for r in results if not r.holds]
    return {"passed": not failed, "total": len(results), "failed": failed,
            "families": summarize_by_family(results)}


def _random_tuple(group: str, rng: np.random.Generator, tables: SubgroupTables):
    def q():
        return QNormal(*(int(v) for v in rng.integers(0, 2, size=4)))

    def c():
        return CNormal(int(rng.integers(0, 4)), int(rng.integers(0, 3)), int(rng.integers(0, 2)))

    def d():
        return DNormal(tuple(int(v) for v in rng.integers(0, 4, size=7)) + (int(rng.integers(0, 2)),))

    def e():
        return EBlock(*(int(v) for v in rng.integers(0, 3, size=4)))

    def p():
        return PNormal(int(rng.integers(0, len(tables.coset_words))), c(), q())

    makers: Dict[str, Callable] = {
        "Q": q, "C": c, "D": d, "CQ": lambda: CQNormal(c(), q()), "P": p,
        "QD": lambda: QDNormal(q(), d()), "PD": lambda: PDNormal(p(), d()),
        "CQD": lambda: CQDNormal(CQNormal(c(), q()), d()),
        "K0D": lambda: K0DNormal(e(), d(), q()),
        "K0CD": lambda: K0CDNormal(K0DNormal(e(), d(), q()), c()),
    }
    return makers[group]()


def _matrix_of(group: str, word) -> ExactMatrix:
    return word_monomial(word).to_matrix() if group in MONOMIAL_GROUPS else eval_word(word)


class VerificationRunner:
    """
    Runs the acceptance checks with per-step timing and a resumable session
    state, mirroring one pipeline step per check.
    """

    def __init__(self,
                 config: Optional[RunConfig] = None,
                 sizes: Optional[AcceptanceSizes] = None,
                 session_id: Optional[str] = None,
                 tables: Optional[SubgroupTables] = None):
        self.config = config or RunConfig()
        self.sizes = sizes or AcceptanceSizes()
        self.session_id = session_id or self._generate_session_id()
        self.file_utils = get_file_utils(self.config.output_dir)
        self.session_dir = self.file_utils.create_session_dir(f"selftest_{self.session_id}")
        self.session_logger = setup_session_logging(self.session_id, str(self.session_dir), self.config.log_level)
        self.tables = tables or get_tables(self.config.resolved_cache_dir)
        self.rng = np.random.default_rng(self.config.seed)
        self.state = self._load_session_state()
        logger.info(f"Verification runner initialized | Session: {self.session_id}")

    def _generate_session_id(self) -> str:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        return f"{timestamp}_{str(uuid.uuid4())[:8]}"

    def _load_session_state(self) -> Dict:
        state_path = self.session_dir / "state.json"
        if state_path.exists():
            state = self.file_utils.load_json(state_path)
            if state:
                logger.info(f"Loaded session state | Last step: {state.get('last_completed_step')}")
                return state
        return {
            "session_id": self.session_id,
            "created_at": datetime.now().isoformat(),
            "last_completed_step": None,
            "steps_completed": [],
            "processing_times": {},
            "total_processing_time": 0,
        }

    def _save_session_state(self):
        self.state["last_updated"] = datetime.now().isoformat()
        self.file_utils.save_json(self.state, self.session_dir / "state.json")

    def _run_step(self, step_name: str, step_function: Callable[[], Dict], resume: bool = False) -> Dict:
        """Run one check, persist its JSON result and timing, re-raise on error."""
        cache_path = self.session_dir / f"{step_name}.json"
        if resume and step_name in self.state.get("steps_completed", []) and cache_path.exists():
            cached = self.file_utils.load_json(cache_path)
            if cached:
                logger.info(f"Resuming from cached step: {step_name}")
                return cached

        self.session_logger.log_step_start(step_name)
        step_start = time.time()
        try:
            result = step_function()
            step_time = time.time() - step_start
            result["seconds"] = round(step_time, 3)
            self.file_utils.save_json(result, cache_path)

            self.state["processing_times"][step_name] = step_time
            if step_name not in self.state.get("steps_completed", []):
                self.state.setdefault("steps_completed", []).append(step_name)
            self.state["last_completed_step"] = step_name
            self._save_session_state()

            self.session_logger.log_step_complete(step_name, step_time, passed=result.get("passed"))
            return result
        except Exception as e:
            self.session_logger.log_error(step_name, e, {"session_id": self.session_id})
            self.state["error"] = str(e)
            self.state["failed_at"] = step_name
            self._save_session_state()
            raise

    # --- the checks ---------------------------------------------------------------

    def check_cs3_relations(self) -> Dict:
        return _relation_step(cs3_relations())

    def check_level_relations(self) -> Dict:
        per_n = {}
        failed = []
        for n in range(2, self.sizes.level_max_n + 1):
            results = verify_relations(level_relations(n), workers=self.config.workers)
            per_n[str(n)] = len(results)
            failed += [r.to_dict() for r in results if not r.holds]
        return {"passed": not failed, "instances": per_n, "failed": failed}

    def check_definitions(self) -> Dict:
        out = _relation_step(definition_relations())
        cck = eval_expanded("CCK0")
        expected = [list(row) for row in ExactMatrix.identity(8).entries]
        for a, r in enumerate((3, 7)):
            for b, c in enumerate((3, 7)):
                expected[r][c] = K_PRIME[a, b]
        block_ok = cck == ExactMatrix(expected)
        det_one = cck.det() == ONE
        out.update({"cck0_block": block_ok, "cck0_det_one": det_one})
        out["passed"] = out["passed"] and block_ok and det_one
        return out

    def check_updown(self) -> Dict:
        return _relation_step(updown_relations())

    def check_intro_and_worked(self) -> Dict:
        return _relation_step(intro_relations() + worked_relations())

    def check_enumeration(self) -> Dict:
        orders = {g: enumerate_subgroup(g).order for g in EXPECTED_ORDERS}
        orders["V"] = len(self.tables.coset_words)
        orders["K0W"] = self.tables.k0w_table.order
        edges = [e.to_dict() for e in check_inclusions(self.tables)]
        counts_ok = all(orders[g] == n for g, n in EXPECTED_ORDERS.items()) and orders["V"] == 105
        return {"passed": counts_ok and all(e["passed"] for e in edges), "orders": orders, "edges": edges}

    def _exhaustive_tuples(self) -> Dict[str, List]:
        groups = {
            "Q": [QNormal(a, b, c, d) for a in range(2) for b in range(2) for c in range(2) for d in range(2)],
            "C": CNormal.all(),
            "D": [DNormal((n0, n1, n2, n3, n4, n5, n6, n7))
                  for n0 in range(4) for n1 in range(4) for n2 in range(4) for n3 in range(4)
                  for n4 in range(4) for n5 in range(4) for n6 in range(4) for n7 in range(2)],
        }
        if self.sizes.exhaustive_p:
            groups["P"] = [PNormal(v, c, q) for v in range(len(self.tables.coset_words))
                           for c in groups["C"] for q in groups["Q"]]
        return groups

    def check_roundtrips(self) -> Dict:
        failures: List[str] = []
        counts: Dict[str, int] = {}

        def roundtrip(group: str, tuples) -> None:
            for t in tuples:
                got = factor(group, _matrix_of(group, t.word(self.tables)), self.tables)
                if got != t:
                    failures.append(f"{group}: {t} came back as {got}")
            counts[group] = counts.get(group, 0) + len(tuples)

        for group, tuples in self._exhaustive_tuples().items():
            roundtrip(group, tuples)
        for group in ("K0D", "K0CD"):
            roundtrip(group, [_random_tuple(group, self.rng, self.tables) for _ in range(self.sizes.random_tuples)])

        member_words = 0
        for group in FACTOR_GROUPS:
            gens = GROUP_GENERATORS[group]
            for _ in range(self.sizes.member_words):
                length = int(self.rng.integers(0, self.sizes.member_word_length + 1))
                word = random_word(self.rng, length, gens)
                m = _matrix_of(group, word)
                if _matrix_of(group, factor(group, m, self.tables).word(self.tables)) != m:
                    failures.append(f"{group}: word {' '.join(word)} does not evaluate back")
                member_words += 1
        return {"passed": not failures, "tuples": counts, "member_words": member_words,
                "failures": failures[:20]}

    def check_normalizer(self) -> Dict:
        failures: List[str] = []
        capped = 0
        for _ in range(self.sizes.normalizer_words):
            length = int(self.rng.integers(0, self.sizes.normalizer_max_length + 1))
            word = random_word(self.rng, length, BASE_ALPHABET)
            sw, stats = almost_normalize(word, self.config, self.tables)
            if eval_word(sw.flatten(self.tables)) != eval_word(word):
                failures.append(" ".join(word))
            capped += int(not stats.exhausted)
        unequal = [str(r) for r in cs3_relations()
                   if not equiv_check(r.lhs, r.rhs, compare_forms=False).equal]
        forms_differ = [str(r) for r in worked_relations()
                        if not equiv_check(r.lhs, r.rhs, config=self.config, tables=self.tables).forms_match]
        return {"passed": not failures and not unequal and not forms_differ and capped == 0,
                "words": self.sizes.normalizer_words, "changed_operator": failures[:20],
                "hit_pass_cap": capped, "cs3_not_equal": unequal, "worked_forms_differ": forms_differ}

    def check_rewriting(self) -> Dict:
        failures: List[str] = []
        unsound = [f"{rs.name}:{rule.source}" for rs in (power_rules(), commute_rules())
                   for rule in rs.rules if not rule.is_sound()]

        simplify = get_rule_set("simplify", step_cap=self.config.step_cap)
        words = [random_word(self.rng, int(self.rng.integers(0, self.sizes.rewrite_word_length + 1)))
                 for _ in range(self.sizes.rewrite_words)]
        for word in words:
            for rs in (power_rules(), commute_rules()):
                if not trace_decreases(word, rs):
                    failures.append(f"{rs.name} measure rose on {' '.join(word)}")
            try:
                rewrite_fixpoint(word, simplify, debug_verify=True)
            except UnsoundRewrite as e:
                failures.append(str(e))
        confluence = confluence_sample(simplify, words).to_dict()

        compiled = syllable_rules(self.tables)
        not_firing = []
        for rule in compiled:
            sw = refold(rule.source, self.tables)
            if not (match_syllable_rule(rule, sw, 1)
                    and apply_syllable_rule(rule, sw, 1, self.tables) == refold(rule.target, self.tables)):
                not_firing.append(rule.label)
        all_compiled = len(compiled) == len(SYLLABLE_RULES)
        return {"passed": not unsound and not failures and not not_firing and all_compiled,
                "unsound_rules": unsound, "failures": failures[:20], "words": len(words),
                "syllable_rules": [r.label for r in compiled], "not_firing": not_firing,
                "confluence": confluence}

    def check_amalgam(self) -> Dict:
        out = _relation_step(amalgam_relations())
        report = check_amalgam(self.tables).to_dict()
        out["generators"] = report
        out["passed"] = out["passed"] and report["passed"]
        return out

    def check_reidemeister_schreier(self) -> Dict:
        p, cs, model = cyclic_toy()
        kernel = rs_present(p, cs)
        presented = brute_force_monoid(kernel.presentation).order
        oracle = brute_force_monoid(kernel.presentation, model=lambda w: model(kernel.expand(w))).order
        level = determinant_kernel(8, self.sizes.rs_sample, self.config.seed).to_dict()
        passed = (presented == oracle == 2 and level["schreier_generators"] == 128
                  and level["soundness"]["passed"])
        return {"passed": passed, "toy_presented_order": presented, "toy_oracle_order": oracle,
                "u8": level}

    def check_membership(self) -> Dict:
        bad_generators = [g for g in BASE_ALPHABET if not is_clifford_cs3(gate_matrix(g))]
        bad_words = []
        for _ in range(self.sizes.det_words):
            word = random_word(self.rng, int(self.rng.integers(0, 30)), BASE_ALPHABET)
            det = eval_word(word).det()
            if det != ONE and det != -ONE:
                bad_words.append(" ".join(word))
        one_level_rejected = not is_clifford_cs3(level_token_matrix("i[0]", 8))
        return {"passed": not bad_generators and not bad_words and one_level_rejected,
                "bad_generators": bad_generators, "bad_words": bad_words[:20],
                "one_level_i_rejected": one_level_rejected}

    STEPS = (
        ("relations_cs3", "check_cs3_relations"),
        ("relations_level", "check_level_relations"),
        ("definitions", "check_definitions"),
        ("upside_down", "check_updown"),
        ("intro_and_worked", "check_intro_and_worked"),
        ("enumeration", "check_enumeration"),
        ("normal_form_roundtrips", "check_roundtrips"),
        ("rewriting", "check_rewriting"),
        ("almost_normalizer", "check_normalizer"),
        ("amalgam", "check_amalgam"),
        ("reidemeister_schreier", "check_reidemeister_schreier"),
        ("membership", "check_membership"),
    )

    def run(self, only: Optional[List[str]] = None, strict: bool = False, resume: bool = False) -> Dict:
        """
        Run the selected steps (all by default) and return the summary. With
        ``strict`` a failed step raises VerificationFailure after the run.
        """
        start_time = time.time()
        results = {}
        for step_name, method in self.STEPS:
            if only and step_name not in only:
                continue
            results[step_name] = self._run_step(step_name, getattr(self, method), resume=resume)

        total = time.time() - start_time
        self.state["total_processing_time"] = total
        self._save_session_state()
        summary = {
            "session_id": self.session_id,
            "passed": all(r.get("passed") for r in results.values()),
            "steps": {name: {"passed": r.get("passed"), "seconds": r.get("seconds")}
                      for name, r in results.items()},
            "total_seconds": round(total, 3),
        }
        self.file_utils.save_json(summary, self.session_dir / "summary.json")
        logger.info(f"Selftest finished | passed={summary['passed']} | Total time: {total:.2f}s")
        if strict and not summary["passed"]:
            failed = [n for n, r in results.items() if not r.get("passed")]
            raise VerificationFailure(f"failed steps: {failed}")
        return summary

    @property
    def output_path(self) -> Path:
        return self.session_dir
