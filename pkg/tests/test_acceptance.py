"""Acceptance suite.

Each test carries a ``criterion`` marker; the summary hook in conftest.py
prints one PASS/FAIL line per criterion at the end of the run.  Run with

    pytest tests/test_acceptance.py -v
"""

import itertools
import os
import random
import subprocess
import sys
from pathlib import Path

import pytest

from dihom import (
    Generator,
    PosetMap,
    PresentedFlow,
    RefinementStep,
    are_isomorphic,
    boundary_states,
    branch_report,
    chain,
    cube,
    edge_occurrence,
    find_ball_occurrences,
    flow_of_poset,
    glob,
    homology,
    identity_map,
    is_full_directed_ball,
    product,
    refine,
    saturate,
    smith_normal_form,
    subdivide_edge,
    tensor,
)
from dihom import io

from helpers import (
    c2,
    bounded_corpus,
    endpoint_map,
    fig5_poset,
    g_n,
    hollow_square,
    hollow_square_with_tails,
    invariant_factors_by_minors,
    random_presentation,
    segment,
)

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"
CORPUS = bounded_corpus()


def say(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")


def iso(a, b):
    return are_isomorphic(a, b) is not None


def two_chain():
    return PresentedFlow(["0", "m", "1"], [("A", "0", "m"), ("B", "m", "1")])


def battery_hosts():
    hosts = [("I", segment()), ("two-chain", two_chain()), ("C2", c2()), ("tailed square", hollow_square_with_tails())]
    for seed in range(4):
        hosts.append((f"random#{seed}", random_presentation(random.Random(seed), 5, 6, 2)))
    return hosts


def battery():
    """(label, host, step) triples for the preservation checks."""
    targets = [("chain2", chain(2)), ("chain3", chain(3)), ("g2", cube(2)), ("g3", cube(3)), ("fig5", fig5_poset())]
    out = []
    for name, host in battery_hosts():
        for i, occ in enumerate(find_ball_occurrences(host, chain(1))):
            label, p = targets[i % len(targets)]
            out.append((f"{name}/{occ.cover_embed[('0', '1')]}->{label}", host, RefinementStep(occ, endpoint_map(p))))
    square = find_ball_occurrences(c2(), cube(2))[0]
    cut = PosetMap(cube(2), product(chain(2), chain(1)), {e: e for e in cube(2).elements})
    into_cube = PosetMap(cube(2), cube(3), {"(0,0)": "(0,0,0)", "(0,1)": "(0,1,0)", "(1,0)": "(1,0,0)", "(1,1)": "(1,1,1)"})
    out.append(("C2/square->chain2 x chain1", c2(), RefinementStep(square, cut)))
    out.append(("C2/square->cube3", c2(), RefinementStep(square, into_cube)))
    out.append(("C2/square->itself", c2(), RefinementStep(square, identity_map(cube(2)))))
    return out


BATTERY = battery()


# -- 1 ---------------------------------------------------------------------------


@pytest.mark.criterion(1, "flow of a product poset is the tensor of the flows")
def test_criterion_1_product_tensor_coherence():
    # 1 + 1 + 2 + 5 + 16 posets on 0..4 points, bounded by a new bottom and top
    assert len(CORPUS) == 25
    failures = [
        (p, q)
        for p, q in itertools.product(CORPUS, repeat=2)
        if not iso(flow_of_poset(product(p, q)), tensor(flow_of_poset(p), flow_of_poset(q)))
    ]
    segment_flow = glob({"u"})
    power = segment_flow
    for n in range(2, 5):
        power = tensor(power, segment_flow)
        if not iso(power, flow_of_poset(cube(n))):
            failures.append(("I", n))
    say(1, not failures, f"{len(CORPUS) ** 2} corpus pairs and I^n for n = 2..4, {len(failures)} mismatches")
    assert not failures


# -- 2 ---------------------------------------------------------------------------


@pytest.mark.criterion(2, "C2 with the relation is a full ball; without it, two classes")
def test_criterion_2_c2_worked_example():
    with_rel, without = saturate(c2()), saturate(hollow_square())
    n_with, n_without = len(with_rel.paths("0", "2")), len(without.paths("0", "2"))
    ok = n_with == 1 and is_full_directed_ball(with_rel) and n_without == 2 and not is_full_directed_ball(without)
    say(2, ok, f"|P_02| = {n_with} with relation, {n_without} without")
    assert ok


# -- 3 ---------------------------------------------------------------------------


@pytest.mark.criterion(3, "refining the segment along g_n gives the n-cube flow")
@pytest.mark.parametrize("n", [2, 3, 4])
def test_criterion_3_zigzag(n):
    r = refine(RefinementStep(edge_occurrence(segment(), "U"), g_n(n)))
    ok = iso(saturate(r), flow_of_poset(cube(n)))
    say(3, ok, f"n = {n}: {len(r.generators)} generators, {len(r.relations)} relations")
    assert ok


# -- 4 ---------------------------------------------------------------------------


def preservation_failures(host, step):
    before = saturate(host)
    after = saturate(refine(step))
    problems = []
    if homology(before) != homology(after):
        problems.append(f"homology {homology(before).betti} -> {homology(after).betti}")
    b0, b1 = branch_report(before), branch_report(after)
    interior = set(step.occurrence.interior())
    for s in before.states:
        if s not in interior and (b0.branch[s], b0.merge[s]) != (b1.branch[s], b1.merge[s]):
            problems.append(f"germ counts changed at {s}")
    if boundary_states(before) != boundary_states(after):
        problems.append("boundary states moved")
    return problems


@pytest.mark.criterion(4, "refinement preserves homology, germ counts and boundary states")
def test_criterion_4_preservation():
    assert len(BATTERY) >= 20
    failures = {label: p for label, host, step in BATTERY if (p := preservation_failures(host, step))}
    say(4, not failures, f"{len(BATTERY)} (host, step) pairs, {len(failures)} with differences")
    assert not failures


# -- 5 ---------------------------------------------------------------------------


def naive_subdivide(x, gen_id, k):
    """Cut a generator into k pieces by hand, rewriting every relation through the pieces."""
    g = x.gen[gen_id]
    mids = [f"cut.{i}" for i in range(1, k)]
    stops = [g.src, *mids, g.tgt]
    pieces = [Generator(f"{gen_id}.{i}", a, b) for i, (a, b) in enumerate(zip(stops, stops[1:]))]
    word = tuple(p.id for p in pieces)

    def sub(w):
        return tuple(itertools.chain.from_iterable(word if h == gen_id else (h,) for h in w))

    gens = [h for h in x.generators if h.id != gen_id] + pieces
    return PresentedFlow(list(x.states) + mids, gens, [(sub(l), sub(r)) for l, r in x.relations])


@pytest.mark.criterion(5, "edge subdivision is refinement along a chain map")
def test_criterion_5_subsumption():
    checked, failures = 0, []
    for name, host in battery_hosts():
        for g in host.generators:
            for k in (2, 3):
                by_refine = saturate(refine(RefinementStep(edge_occurrence(host, g.id), endpoint_map(chain(k)))))
                by_subdivide = saturate(subdivide_edge(host, g.id, k))
                by_hand = saturate(naive_subdivide(host, g.id, k))
                checked += 1
                if not (iso(by_subdivide, by_refine) and iso(by_subdivide, by_hand)):
                    failures.append((name, g.id, k))
    say(5, not failures, f"{checked} (host, edge, k) cases, {len(failures)} mismatches")
    assert not failures


# -- 6 ---------------------------------------------------------------------------


@pytest.mark.criterion(6, "subdivision sequences of the segment only reach chains")
def test_criterion_6_subdivisions_stay_chains():
    # breadth-first over all subdivision sequences; refinement respects
    # isomorphism, so each level is kept up to isomorphism of the result
    cube3 = flow_of_poset(cube(3))
    level = [segment()]
    seen, bad = 1, []
    for depth in range(1, 6):
        reps = []
        for x in level:
            for g in x.generators:
                for k in (2, 3):
                    y = subdivide_edge(x, g.id, k)
                    t = saturate(y)
                    seen += 1
                    if not iso(t, flow_of_poset(chain(len(y.generators)))) or iso(t, cube3):
                        bad.append((depth, y))
                    if not any(len(r.generators) == len(y.generators) and iso(saturate(r), t) for r in reps):
                        reps.append(y)
        level = reps
    lengths = sorted(len(x.generators) for x in level)
    say(6, not bad, f"{seen} subdivisions up to depth 5, depth-5 chain lengths {lengths[0]}..{lengths[-1]}, {len(bad)} non-chains")
    assert not bad


# -- 7 ---------------------------------------------------------------------------


def random_matrices(n=100, seed=7):
    rnd = random.Random(seed)
    out = []
    for i in range(n):
        r, c = rnd.randint(1, 6), rnd.randint(1, 6)
        if i % 2:
            m = [[rnd.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        else:
            # a product through a small diagonal gives repeated and divisible factors
            k = rnd.randint(1, min(r, c))
            a = [[rnd.randint(-2, 2) for _ in range(k)] for _ in range(r)]
            d = [rnd.choice([1, 2, 3, 4, 6]) for _ in range(k)]
            b = [[rnd.randint(-2, 2) for _ in range(c)] for _ in range(k)]
            m = [[sum(a[x][t] * d[t] * b[t][y] for t in range(k)) for y in range(c)] for x in range(r)]
        out.append(m)
    return out


@pytest.mark.criterion(7, "Smith normal form and nerve homology")
def test_criterion_7_smith_against_minors():
    mats = random_matrices()
    wrong = [m for m in mats if smith_normal_form(m) != invariant_factors_by_minors(m)]
    nontrivial = sum(1 for m in mats if any(f > 1 for f in invariant_factors_by_minors(m)))
    say(7, not wrong, f"{len(mats)} matrices ({nontrivial} with torsion-bearing factors), {len(wrong)} disagreements")
    assert not wrong


@pytest.mark.criterion(7, "Smith normal form and nerve homology")
def test_criterion_7_hollow_square_homology():
    h = homology(saturate(hollow_square()))
    ok = h.group(0) == "ℤ" and h.group(1) == "ℤ" and all(h.group(k) == "0" for k in range(2, 4))
    say(7, ok, "hollow square: " + ", ".join(h.report().splitlines()))
    assert ok


@pytest.mark.criterion(7, "Smith normal form and nerve homology")
def test_criterion_7_bounded_flows_are_points():
    bad = [p for p in CORPUS if homology(flow_of_poset(p)).trimmed() != ((1, ()),)]
    bad += [n for n in range(2, 5) if homology(flow_of_poset(cube(n))).trimmed() != ((1, ()),)]
    say(7, not bad, f"{len(CORPUS)} bounded posets and cubes 2..4 have the homology of a point")
    assert not bad


# -- 8 ---------------------------------------------------------------------------


def library_outputs(seed):
    rnd = random.Random(seed)
    chunks = [io.dumps(io.to_doc(saturate(x, rng=rnd))) for _, x in battery_hosts()]
    for label, host, step in BATTERY:
        occs = find_ball_occurrences(host, step.occurrence.ball_poset, rng=rnd)
        key = step.occurrence.image_key()
        occ = next(o for o in occs if o.image_key() == key)
        chunks.append(label + "\n" + io.dumps(io.to_doc(refine(RefinementStep(occ, step.t_map)))))
    return "".join(chunks)


@pytest.mark.criterion(8, "saturate, refine and CLI reports are byte-identical across runs")
def test_criterion_8_library_determinism():
    outputs = {library_outputs(seed) for seed in range(5)}
    say(8, len(outputs) == 1, f"saturate and refine over the battery, 5 shuffled runs, {len(outputs)} distinct outputs")
    assert len(outputs) == 1


CLI_RUNS = [
    ["info", "c2.json"],
    ["info", "hollow_square.json"],
    ["saturate", "hollow_square.json"],
    ["invariants", "hollow_square.json"],
    ["dot", "c2.json"],
    ["refine", "segment.json", "cube3_step.json"],
    ["refine", "segment.json", "subdivide_step.json"],
    ["subdivide", "c2.json", "V", "-k", "3"],
    ["match-balls", "c2.json", "square.json", "--all"],
    ["iso", "c2.json", "c2.json"],
    ["tensor", "segment.json", "segment.json"],
    ["poset-flow", "square.json", "--presentation"],
    ["check-tmap", "g3.json"],
    ["glob", "a", "b", "c"],
]

CLI_SCRIPT = """
import contextlib, io, sys
from dihom.cli import main
seed, runs = sys.argv[1], [r.split("\\x1f") for r in sys.argv[2:]]
for argv in runs:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv + ["--seed", seed])
    sys.stdout.write(f"$ {' '.join(argv)} -> {code}\\n{out.getvalue()}{err.getvalue()}")
"""


@pytest.mark.criterion(8, "saturate, refine and CLI reports are byte-identical across runs")
def test_criterion_8_cli_determinism(tmp_path):
    # separate interpreters with different hash seeds also reorder every set and dict of strings
    (tmp_path / "square.json").write_text(io.dumps({"cube": 2}), encoding="utf-8")
    (tmp_path / "g3.json").write_text(io.dumps(io.to_doc(g_n(3))), encoding="utf-8")
    runs = [[str(DATA / a) if (DATA / a).exists() else str(tmp_path / a) if a.endswith(".json") else a for a in r]
            for r in CLI_RUNS]
    outputs = set()
    for seed in range(5):
        env = {**os.environ, "PYTHONHASHSEED": str(1000 + seed)}
        done = subprocess.run(
            [sys.executable, "-c", CLI_SCRIPT, str(seed), *["\x1f".join(r) for r in runs]],
            env=env, capture_output=True, text=True, check=True,
        )
        outputs.add(done.stdout)
    text = next(iter(outputs))
    codes = [line.rsplit(" ", 1)[1] for line in text.splitlines() if line.startswith("$ ")]
    ok = len(outputs) == 1 and codes == ["0"] * len(CLI_RUNS)
    say(8, ok, f"{len(CLI_RUNS)} CLI reports, 5 interpreters, {len(outputs)} distinct transcripts")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
