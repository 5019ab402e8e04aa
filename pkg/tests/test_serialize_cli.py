import io
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gen import random_subspace, random_unit, random_vector
from qlattice.arith import DomainError, GaussianRational, ParseError
from qlattice.cli import Config, run
from qlattice.hilbert import Vector
from qlattice.lattice import Certificate, Subspace, certificate_valid, same_subspace
from qlattice.serialize import (
    certificate_from_json,
    certificate_to_json,
    dumps,
    loads,
    operator_from_json,
    operator_to_json,
    plfunction_from_json,
    plfunction_to_json,
    state_from_json,
    state_to_json,
    subspace_from_json,
    subspace_to_json,
    vector_from_json,
    vector_to_json,
)
from qlattice.spectral import BoundedOperator, PLFunction
from qlattice.states import State

e = [Vector.basis(i) for i in range(4)]
seeds = st.integers(0, 2**32 - 1)


# round trips ---------------------------------------------------------------------


def test_vector_json_form():
    v = Vector({0: Fraction(3, 5), 2: GaussianRational(0, Fraction(-4, 5))})
    assert dumps(vector_to_json(v)) == '{"entries":[[0,"3/5","0"],[2,"0","-4/5"]]}'
    assert vector_from_json({"entries": [[1, "1/2"]]}) == Vector({1: Fraction(1, 2)})
    for bad in ({"entries": [[0, 1.5, "0"]]}, {"entries": [[-1, "1", "0"]]}, {"entries": [[0, "1"], [0, "2"]]}, {}):
        with pytest.raises(ParseError):
            vector_from_json(bad)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_round_trips(seed):
    rng = random.Random(seed)
    v = random_vector(rng)
    assert vector_from_json(loads(dumps(vector_to_json(v)))) == v
    L = random_subspace(rng)
    back = subspace_from_json(loads(dumps(subspace_to_json(L))))
    assert back.generators == L.generators and same_subspace(back, L)
    cert = Certificate(random_unit(rng), Fraction(rng.randint(0, 9), 10))
    assert certificate_from_json(loads(dumps(certificate_to_json(cert)))) == cert
    eigs = [Fraction(rng.randint(-6, 6), 6) for _ in range(rng.randint(1, 5))]
    A = BoundedOperator.diagonal(eigs)
    B = operator_from_json(loads(dumps(operator_to_json(A))))
    assert all(B.entry(i, j) == A.entry(i, j) for i in range(6) for j in range(6))
    f = PLFunction([(Fraction(-1), Fraction(rng.randint(-3, 3))), (Fraction(1, 3), 0), (Fraction(1), 1)])
    assert plfunction_from_json(loads(dumps(plfunction_to_json(f)))) == f


def test_operator_round_trips():
    T = BoundedOperator.banded_toeplitz({0: Fraction(1, 4), 2: GaussianRational(0, Fraction(1, 4))})
    U = operator_from_json(operator_to_json(T))
    assert all(U.entry(i, j) == T.entry(i, j) for i in range(6) for j in range(6))
    F = BoundedOperator.finite({(0, 0): Fraction(1, 2), (0, 1): GaussianRational(0, Fraction(1, 3))}, size=3)
    G = operator_from_json(loads(dumps(operator_to_json(F))))
    assert G.size == 3 and all(G.entry(i, j) == F.entry(i, j) for i in range(3) for j in range(3))
    with pytest.raises(DomainError):
        operator_to_json(BoundedOperator.right_shift())
    with pytest.raises(ParseError):
        operator_from_json({"kind": "sparse", "entries": []})


def test_state_round_trips():
    S = State.finite([(Fraction(1, 3), e[0]), (Fraction(2, 3), e[1])])
    T = state_from_json(loads(dumps(state_to_json(S))))
    assert T.prefix(2) == S.prefix(2)
    G = State.geometric(lambda n: (Fraction(1, 2 ** (n + 1)), Vector.basis(n)), Fraction(1, 2))
    obj = state_to_json(G, Fraction(1, 2), prefix=3)
    H = state_from_json(obj)
    assert H.prefix(3) == G.prefix(3) and H.tail(3) == Fraction(1, 8)
    with pytest.raises(DomainError):
        state_from_json({"terms": [["1/2", vector_to_json(e[0])]]})


def test_subspace_with_tail_bound():
    L = subspace_from_json({"generators": [vector_to_json(e[1])], "tail_bound": "0"})
    assert not L.is_finite and L.declared_tail == 0
    assert subspace_to_json(L) == {"generators": [vector_to_json(e[1])], "tail_bound": "0"}
    with pytest.raises(DomainError):
        subspace_from_json({"generators": [], "tail_bound": "-1"})


def test_loads_rejects_garbage():
    with pytest.raises(ParseError):
        loads("{not json")


# CLI ------------------------------------------------------------------------------


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return write


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def no_config(monkeypatch):
    monkeypatch.delenv("QLATTICE_CONFIG", raising=False)


def test_cli_dist(files):
    e0 = files("e0.json", vector_to_json(e[0]))
    s1 = files("s1.json", subspace_to_json(Subspace.span(e[1])))
    assert cli("dist", "--vec", e0, "--subspace", s1) == (0, "1\n", "")
    code, out, _ = cli("--output", "json", "dist", "--vec", e0, "--subspace", s1)
    assert code == 0 and json.loads(out) == {"distance2": "1"}


def test_cli_encode(files):
    s1 = files("s1.json", subspace_to_json(Subspace.span(e[1])))
    code, out, _ = cli("encode", "--subspace", s1, "--max-certs", "3")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 3
    for line in lines:
        cert = certificate_from_json(json.loads(line))
        assert certificate_valid(Subspace.span(e[1]), cert.c, cert.r)


def test_cli_notmember_and_state(files):
    s1 = files("s1.json", subspace_to_json(Subspace.span(e[1])))
    e0 = files("e0.json", vector_to_json(e[0]))
    assert cli("notmember", "--subspace", s1, "--vec", e0, "--fuel", "3")[1] == "confirmed\n"
    assert cli("notmember", "--subspace", e0, "--vec", e0)[0] == 3  # a vector file is not a subspace
    x = Vector({0: Fraction(3, 5), 1: Fraction(4, 5)})
    pure = files("pure.json", {"vector": vector_to_json(x)})
    s0 = files("s0.json", subspace_to_json(Subspace.span(e[0])))
    assert cli("state", "--state", pure, "--subspace", s0)[1] == "9/25\n"
    mixed = files("mixed.json", state_to_json(State.finite([(Fraction(1, 2), e[0]), (Fraction(1, 2), e[1])])))
    assert cli("state", "--state", mixed, "--subspace", s0)[1] == "1/2\n"
    assert cli("state", "--state", mixed, "--subspace", s0, "--prefix", "1")[1] == "[1/2, 1]\n"


def test_cli_specval(files):
    op = files("op.json", {"kind": "diagonal", "entries": ["1/2", "-1/2"]})
    x = files("x.json", vector_to_json(Vector({0: Fraction(3, 5), 1: Fraction(4, 5)})))
    assert cli("specval", "--op", op, "--vec", x, "--set", "[1/4,3/4]", "--q", "1/2", "--fuel", "8")[1] == "confirmed\n"
    assert cli("specval", "--op", op, "--vec", x, "--set", "[-1,1]", "--q", "1")[1] == "unknown\n"
    code, out, _ = cli("specval", "--op", op, "--vec", x, "--set", "{-1/2}", "--upper", "--fuel", "3")
    assert code == 0 and out.splitlines() == ["1", "1", "13/16", "47/64"]
    ident = files("id.json", plfunction_to_json(PLFunction.identity()))
    code, out, _ = cli("specval", "--op", op, "--vec", x, "--fn", ident, "--precision", "1/100")
    lo, hi = (Fraction(s) for s in out.strip()[1:-1].split(", "))
    assert code == 0 and lo <= Fraction(-7, 50) <= hi
    assert cli("specval", "--op", op, "--vec", x, "--set", "[0,1")[0] == 3
    assert cli("specval", "--op", op, "--vec", x, "--set", "[0,1]")[0] == 3


def test_cli_sotcheck_and_demo(files):
    p = files("e3.json", vector_to_json(e[3]))
    code, out, _ = cli("sotcheck", "--family", "left-shift", "--probe", p, "--n", "10")
    assert code == 0 and out == "probe 0: converged at n0=4\nverdict: converged\n"
    code, out, _ = cli("--output", "json", "sotcheck", "--family", "right-shift", "--probe", p)
    assert json.loads(out)["verdict"] == "not converged"
    code, out, _ = cli("demo", "schroeder", "--max-n", "5")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 5 and all(line.endswith("=1/2") for line in lines)
    code, out, _ = cli("demo", "join", "--max-n", "4", "--K", "4")
    assert out.splitlines()[-1] == "n=4 dim meet(P, Q_n)=1"
    code, out, _ = cli("--output", "json", "demo", "biorth", "--max-n", "3")
    assert [json.loads(line)["is_line"] for line in out.splitlines()] == [True] * 3


def test_cli_exit_codes(files, tmp_path):
    assert cli()[0] == 1
    assert cli("frobnicate")[0] == 1
    assert cli("dist", "--vec")[0] == 1
    bad = files("bad.json", {"entries": [[0, "2", "0"]]})
    s0 = files("s0.json", subspace_to_json(Subspace.span(e[0])))
    assert cli("state", "--state", files("p.json", {"vector": {"entries": [[0, "2"]]}}), "--subspace", s0)[0] == 2
    assert cli("dist", "--vec", str(tmp_path / "missing.json"), "--subspace", s0)[0] == 3
    (tmp_path / "junk.json").write_text("{")
    assert cli("dist", "--vec", str(tmp_path / "junk.json"), "--subspace", s0)[0] == 3
    assert cli("demo", "schroeder", "--max-n", "0")[0] == 2
    assert cli("notmember", "--subspace", s0, "--vec", bad, "--fuel", "0")[0] == 2


def test_cli_determinism(files):
    s = files("s.json", subspace_to_json(Subspace.span(e[0] + e[1], e[2])))
    a = cli("encode", "--subspace", s, "--max-certs", "25")
    b = cli("encode", "--subspace", s, "--max-certs", "25")
    assert a == b and a[1].count("\n") == 25


def test_config(files, monkeypatch):
    cfg = files("cfg.json", {"default_fuel": 2, "output_format": "json", "default_precision": "1/8"})
    monkeypatch.setenv("QLATTICE_CONFIG", cfg)
    assert Config.load() == Config(2, Fraction(1, 8), "json", "level")
    e0 = files("e0.json", vector_to_json(e[0]))
    s1 = files("s1.json", subspace_to_json(Subspace.span(e[1])))
    code, out, _ = cli("notmember", "--subspace", s1, "--vec", e0)
    assert code == 0 and json.loads(out) == {"verdict": "confirmed", "fuel": 2}
    with pytest.raises(DomainError):
        Config(default_fuel=0)
    with pytest.raises(DomainError):
        Config(dovetail_seed_order="random")
    with pytest.raises(ParseError):
        Config.from_mapping({"colour": "blue"})
    monkeypatch.setenv("QLATTICE_CONFIG", files("bad.json", {"default_precision": "0"}))
    assert cli("dist", "--vec", e0, "--subspace", s1)[0] == 2
