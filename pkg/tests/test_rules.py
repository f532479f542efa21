import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disembed.rhetorical import Relation
from disembed.rules import (
    RULE_NAMES,
    Constituency,
    Realization,
    RuleInvariantError,
    TransformationRule,
    apply,
    catalog,
    copula,
    load_rule_order,
    phrasal_disembed,
)
from disembed import pattern as pat
from disembed.tree import as_sentence, parse_ptb
from treegen import random_trees

RULES = {r.name: r for r in catalog()}


def text(tree):
    return " ".join(tree.tokens())


def first_outcome(tree):
    for rule in catalog():
        out = apply(rule, tree)
        if out is not None:
            return out
    return None


def test_catalog_has_sixteen_rules_in_fixed_order():
    names = [r.name for r in catalog()]
    assert len(names) == 16
    assert names == [
        "coordination_colon", "coordination_conjunction", "attribution_leading", "attribution_trailing",
        "subordination_pre", "subordination_post", "relative_nonrestrictive", "relative_restrictive",
        "participial_trailing", "participial_leading", "apposition_nonrestrictive",
        "coordination_verb_phrases", "coordination_np_subject", "coordination_np_object",
        "direct_speech", "parenthetical",
    ]
    assert catalog()[0].constituency is Constituency.COORDINATE


def test_subordination_post_is_the_closing_clause_rule():
    rule = RULES["subordination_post"]
    assert rule.environment == "subordination-trailing"
    assert "SBAR=sbar (z:x S=sub" in rule.pattern.source


def test_catalog_override_and_unknown_names():
    assert [r.name for r in catalog(["parenthetical", "direct_speech"])] == ["parenthetical", "direct_speech"]
    with pytest.raises(KeyError):
        catalog(["no_such_rule"])


def test_load_rule_order(tmp_path):
    p = tmp_path / "rules.txt"
    p.write_text("# only two\nsubordination_post\n\ncoordination_colon\n")
    assert load_rule_order(p) == ["subordination_post", "coordination_colon"]
    j = tmp_path / "rules.json"
    j.write_text('["parenthetical"]')
    assert load_rule_order(j) == ["parenthetical"]


def test_red_spot_split(red_spot):
    out = apply(RULES["subordination_post"], as_sentence(red_spot[0]))
    assert [text(t) for t, _ in out.sentences] == [
        "The Great Red Spot may have been observed in 1664 by Robert Hooke", "this is disputed"]
    assert out.cue_phrase == ("although",)
    assert out.relation is Relation.CONTRAST
    # Contrast is multinuclear: both sides core
    assert out.constituency is Constituency.COORDINATE
    assert [c for _, c in out.sentences] == [False, False]


def test_main_sentence_is_gap_concatenation(red_spot):
    tree = as_sentence(red_spot[0])
    rule = RULES["subordination_post"]
    m = pat.match_first(rule.pattern, tree)
    concat = [w for g in ("z1",) for w in m.gap_tokens(g)] + m["np"].tokens()
    for g in ("z2", "z3", "z4", "z5"):
        concat += m.gap_tokens(g)
    main = apply(rule, tree).sentences[0][0]
    punct = {",", "."}
    assert main.tokens() == [w for w in concat if w not in punct]


def test_condition_stays_subordinate(treasury):
    leaf = as_sentence(parse_ptb(
        "(S (NP (DT the) (NN funding)) (VP (MD will) (VP (VB be) (VP (VBN delayed) "
        "(SBAR (IN if) (S (NP (NNP Congress)) (VP (VBP fails))))))))"))
    out = apply(RULES["subordination_post"], leaf)
    assert out.relation is Relation.CONDITION
    assert out.constituency is Constituency.SUBORDINATE
    assert [(text(t), c) for t, c in out.sentences] == [("the funding will be delayed", False),
                                                       ("Congress fails", True)]


def test_canonical_clause_coordination():
    t = as_sentence(parse_ptb("(S (S (NP (NN x)) (VP (VBZ sleeps))) (CC and) (S (NP (NN y)) (VP (VBZ runs))))"))
    out = first_outcome(t)
    assert out.rule == "coordination_conjunction"
    assert [text(s) for s, _ in out.sentences] == ["x sleeps", "y runs"]
    assert out.cue_phrase == ("and",)
    assert out.constituency is Constituency.COORDINATE


def test_np_subject_coordination():
    t = as_sentence(parse_ptb(
        "(S (NP (NP (NNP Congress)) (CC and) (NP (NN President) (NNP Bush))) (VP (VBP fail) (S (VP (TO to) "
        "(VP (VB increase) (NP (NP (DT the) (NNP Treasury) (POS 's)) (NN borrowing) (NN capacity)))))))"))
    out = first_outcome(t)
    assert out.rule == "coordination_np_subject"
    assert [text(s) for s, _ in out.sentences] == [
        "Congress fail to increase the Treasury 's borrowing capacity",
        "President Bush fail to increase the Treasury 's borrowing capacity"]
    assert out.relation is Relation.LIST
    assert out.constituency is Constituency.COORDINATE


def test_semicolon_split_of_sotomayor(sotomayor):
    out = first_outcome(as_sentence(sotomayor[0]))
    assert out.rule == "coordination_colon"
    assert out.relation is Relation.UNKNOWN
    assert len(out.sentences) == 2


def test_participial_split_copies_subject_and_copula():
    t = as_sentence(parse_ptb(
        "(S (NP (PRP she)) (VP (VBD was) (VP (VBN confirmed) (, ,) (S (VP (VBG becoming) (NP (DT the) (NN head)))))))"))
    out = first_outcome(t)
    assert out.rule == "participial_trailing"
    assert [text(s) for s, _ in out.sentences] == ["she was confirmed", "she was becoming the head"]
    copula_leaf = out.sentences[1][0].leaves()[1]
    assert copula_leaf.source is None  # synthetic
    assert out.sentences[1][0].leaves()[0].source == 0


def test_copula_tense_follows_auxiliary():
    assert copula(parse_ptb("(ROOT (S (NP (PRP they)) (VP (VBP are) (VP (VBN seen)))))")).word == "are"
    assert copula(parse_ptb("(ROOT (S (NP (PRP they)) (VP (VBD ran))))")).word == "was"


def test_attribution_leading_gives_simple_context():
    t = as_sentence(parse_ptb(
        "(S (NP (DT A) (NN survey)) (VP (VBD suggested) (SBAR (IN that) (S (NP (DT the) (NN crater)) "
        "(VP (VBD was) (NP (DT a) (NN scar)))))))"))
    out = first_outcome(t)
    assert out.rule == "attribution_leading"
    assert [text(s) for s, _ in out.sentences] == ["the crater was a scar"]
    (ctx,) = out.simple_contexts
    assert ctx.relation is Relation.ATTRIBUTION
    assert ctx.text == ("a", "survey", "suggested")
    assert ctx.span == (0, 3)


def test_nonrestrictive_relative(corpus):
    out = first_outcome(as_sentence(corpus[3][0]))
    assert out.rule == "relative_nonrestrictive"
    assert [(text(s), c) for s, c in out.sentences] == [("Cassini discovered the gap", False),
                                                       ("Cassini was an astronomer", True)]
    assert out.relation is Relation.ELABORATION


def test_apposition_is_noun_based(corpus):
    out = first_outcome(as_sentence(corpus[6][0]))
    assert out.rule == "apposition_nonrestrictive"
    assert out.relation is Relation.NOUN_BASED
    assert [text(s) for s, _ in out.sentences] == ["Giovanni Cassini observed the spot",
                                                   "Giovanni Cassini was an astronomer"]


def test_date_apposition_is_not_split():
    t = as_sentence(parse_ptb("(S (NP (NNP Bob)) (VP (VBD left) (PP (IN on) (NP (NP (NNP May) (CD 26)) (, ,) (NP (CD 2009))))))"))
    assert apply(RULES["apposition_nonrestrictive"], t) is None


def test_complement_that_clause_is_not_subordination():
    t = as_sentence(parse_ptb("(S (NP (PRP he)) (VP (VBD knew) (SBAR (IN that) (S (NP (PRP she)) (VP (VBD left))))))"))
    assert apply(RULES["subordination_post"], t) is None


def test_flag_discipline_and_shrinking(corpus):
    for doc in corpus:
        for tree in doc:
            t = as_sentence(tree)
            out = first_outcome(t)
            if out is None:
                continue
            flags = [c for _, c in out.sentences]
            if out.constituency is Constituency.COORDINATE:
                assert not any(flags)
            elif len(flags) > 1:
                assert any(flags)
            n = len(t.tokens())
            assert all(len(s.tokens()) < n for s, _ in out.sentences)


def test_fixpoint_is_idempotent():
    t = as_sentence(parse_ptb("(S (NP (NN x)) (VP (VBZ sleeps)))"))
    assert first_outcome(t) is None
    assert first_outcome(t) is None


def test_non_shrinking_realizer_is_rejected():
    def grow(m, tree):
        return Realization([(tree, False), (tree, False)])

    bad = TransformationRule("grow", pat.compile("ROOT"), Constituency.COORDINATE, "coordination", grow)
    with pytest.raises(RuleInvariantError):
        apply(bad, as_sentence(parse_ptb("(S (NN x))")))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_every_rule_output_is_shorter(seed):
    for tree in random_trees(5, seed=seed):
        t = as_sentence(tree)
        for rule in catalog():
            out = apply(rule, t)
            if out is not None:
                assert all(len(s.tokens()) < len(t.tokens()) for s, _ in out.sentences)


# -- phrasal ------------------------------------------------------------------

def test_phrasal_sotomayor_first_clause():
    t = as_sentence(parse_ptb(
        "(S (NP (PRP he)) (VP (VBD nominated) (NP (NNP Sonia) (NNP Sotomayor)) (PP (IN on) (NP (NNP May) (CD 26) "
        "(, ,) (CD 2009))) (S (VP (TO to) (VP (VB replace) (NP (NNP David) (NNP Souter)))))))"))
    core, ctx = phrasal_disembed(t)
    assert text(core) == "he nominated Sonia Sotomayor"
    assert [(c.relation, " ".join(c.text)) for c in ctx] == [
        (Relation.PURPOSE, "to replace David Souter"), (Relation.TEMPORAL, "on May 26 , 2009")]
    assert ctx[0].span == (9, 13)


def test_phrasal_on_monday(treasury):
    t = as_sentence(parse_ptb(
        "(S (NP (DT the) (NNP Treasury)) (VP (MD will) (VP (VB announce) (NP (NP (NNS details)) (PP (IN of) "
        "(NP (DT the) (NNP November) (NN refunding)))) (PP (IN on) (NP (NNP Monday))))))"))
    core, ctx = phrasal_disembed(t)
    assert text(core) == "the Treasury will announce details of the November refunding"
    assert [(c.relation, c.text) for c in ctx] == [(Relation.TEMPORAL, ("on", "Monday"))]


def test_phrasal_identity():
    t = as_sentence(parse_ptb("(S (NP (NN x)) (VP (VBZ sleeps)))"))
    core, ctx = phrasal_disembed(t)
    assert core == t and ctx == []


def test_phrasal_leaves_complements_and_years():
    fail = as_sentence(parse_ptb("(S (NP (NNP Congress)) (VP (VBP fail) (S (VP (TO to) (VP (VB act))))))"))
    assert phrasal_disembed(fail)[1] == []
    year = as_sentence(parse_ptb("(S (NP (PRP it)) (VP (VBD happened) (PP (IN in) (NP (CD 1664)))))"))
    assert phrasal_disembed(year)[1] == []
    modal = as_sentence(parse_ptb("(S (NP (PRP it)) (VP (MD may) (VP (VB rain) (PP (IN on) (NP (NNP Monday))))))"))
    assert [c.text for c in phrasal_disembed(modal)[1]] == [("on", "Monday")]
    copular = as_sentence(parse_ptb("(S (NP (DT the) (NN meeting)) (VP (VBZ is) (PP (IN on) (NP (NNP Monday)))))"))
    assert phrasal_disembed(copular)[1] == []


def test_spatial_needs_loc_tag():
    tagged = as_sentence(parse_ptb("(S (NP (PRP they)) (VP (VBD met) (PP-LOC (IN in) (NP (NNP Paris)))))"))
    plain = as_sentence(parse_ptb("(S (NP (PRP they)) (VP (VBD met) (PP (IN in) (NP (NNP Paris)))))"))
    assert [c.relation for c in phrasal_disembed(tagged)[1]] == [Relation.SPATIAL]
    assert phrasal_disembed(plain)[1] == []


def test_rule_names_constant():
    assert RULE_NAMES == tuple(r.name for r in catalog())
