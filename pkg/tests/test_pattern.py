import pytest

from disembed import pattern as pat
from disembed.rules import catalog
from disembed.tree import parse_ptb


def toks(seq):
    return [w for t in seq for w in t.tokens()]


def test_compile_records_names():
    p = pat.compile("S (z:a NP=subj ... VP*<l,r>=vp)")
    assert p.captures == {"subj", "vp"}
    assert p.gaps == {"a", "l", "r"}
    assert str(p) == "S (z:a NP=subj ... VP*<l,r>=vp)"


@pytest.mark.parametrize("src", [
    "", "(S)", "S (NP", "S ) NP", "S (z:a NP z:a)", "S (NP=x VP=x)", "S (z:", "NP||VP", "S (z:bad-name)",
])
def test_syntax_errors(src):
    with pytest.raises(pat.PatternSyntaxError):
        pat.compile(src)


def test_syntax_error_offset():
    with pytest.raises(pat.PatternSyntaxError) as err:
        pat.compile("S (NP=x VP=x)")
    assert err.value.offset == 8


def test_label_matches_category_and_alternation():
    t = parse_ptb("(S (NP-SBJ (PRP he)) (VP (VBD ran)))")
    assert pat.match_first(pat.compile("NP=n"), t)["n"].label == "NP-SBJ"
    assert pat.match_first(pat.compile("NP-SBJ=n"), t) is not None
    assert pat.match_first(pat.compile("NP-TMP=n"), t) is None
    assert [m["x"].label for m in pat.match_all(pat.compile("PRP|VBD=x"), t)] == ["PRP", "VBD"]


def test_wildcard_never_matches_words():
    t = parse_ptb("(S (NN a))")
    labels = [m["x"].label for m in pat.match_all(pat.compile("__=x"), t)]
    assert labels == ["S", "NN"]


def test_child_list_is_anchored():
    t = parse_ptb("(S (NP (NN a)) (VP (VBZ b)) (. .))")
    assert pat.match_first(pat.compile("S (NP VP)"), t) is None
    assert pat.match_first(pat.compile("S (NP VP ...)"), t) is not None


def test_gaps_are_minimal_leftmost():
    t = parse_ptb("(S (NP (NN a)) (NP (NN b)) (NP (NN c)))")
    ms = pat.match_all(pat.compile("S (z:pre NP=n z:post)"), t)
    assert [m["n"].tokens() for m in ms] == [["a"], ["b"], ["c"]]
    assert toks(ms[1].gaps["pre"]) == ["a"]
    assert ms[1].gap_tokens("post") == ["c"]


def test_chain_binds_deepest_and_collects_upper_siblings():
    t = parse_ptb("(VP (MD may) (VP (VB have) (VP (VBN seen) (NP (NN it)))) (. .))")
    m = pat.match_first(pat.compile("VP*<up,down>=v (VBN NP)"), t)
    assert m["v"].tokens() == ["seen", "it"]
    assert m.gap_tokens("up") == ["may", "have"]
    assert m.gap_tokens("down") == ["."]


def test_chain_without_named_gaps_merges_into_boundary_gaps():
    t = parse_ptb("(VP (MD may) (VP (VBN seen) (NP (NN it))))")
    m = pat.match_first(pat.compile("VP* (z:a NP z:b)"), t)
    assert m.gap_tokens("a") == ["may", "seen"]
    # the outer VP has an extra sibling and no boundary gap to put it in
    assert [m.root for m in pat.match_all(pat.compile("VP* (VBN NP)"), t)] == [t.children[1]]


def test_chain_stops_at_branching():
    t = parse_ptb("(VP (VP (VBD sang)) (CC and) (VP (VBD danced)))")
    m = pat.match_first(pat.compile("VP*=v"), t)
    assert m["v"] is t


def test_matches_found_in_preorder_and_deduplicated():
    t = parse_ptb("(S (NP (NP (NN a)) (PP (IN of) (NP (NN b)))) (VP (VBZ c)))")
    ms = pat.match_all(pat.compile("NP=n"), t)
    assert [m["n"].tokens() for m in ms] == [["a", "of", "b"], ["a"], ["b"]]
    assert len({m.key() for m in ms}) == len(ms)


def test_trailing_clause_rule_on_red_spot_tree(red_spot):
    rule = {r.name: r for r in catalog()}["subordination_post"]
    from disembed.tree import as_sentence

    m = pat.match_first(rule.pattern, as_sentence(red_spot[0]))
    assert m is not None
    assert m.gap_tokens("x") == ["although"]
    assert m.gap_tokens("z1") == []
    assert m["np"].tokens() == ["The", "Great", "Red", "Spot"]
    assert m["sub"].tokens() == ["this", "is", "disputed"]
    assert m.gap_tokens("z3") == ["may", "have", "been", "observed", "in", "1664", "by", "Robert", "Hooke", ","]
