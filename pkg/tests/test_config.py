from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exotic_vortex.config import (
    FAMILIES,
    RunConfig,
    format_complex,
    parse_complex,
    parse_config,
    serialize_config,
)
from exotic_vortex.errors import ConfigError

fin = st.floats(allow_nan=False, allow_infinity=False, width=64)
cplx = st.builds(complex, fin, fin)
sign = st.sampled_from([-1, 0, 1])
word = st.from_regex(r"[A-Za-z0-9_./-]{1,12}", fullmatch=True)
clist = st.lists(cplx, min_size=1, max_size=4).map(tuple)


@st.composite
def run_configs(draw):
    F = draw(st.integers(1, 2))
    G = draw(st.integers(1, 2))
    charges = tuple(tuple(draw(st.lists(fin, min_size=G, max_size=G))) for _ in range(F))
    boundary = draw(
        st.one_of(
            st.just(()),
            st.lists(st.one_of(st.just("vacuum"), fin.map(repr)), min_size=F, max_size=F).map(tuple),
        )
    )
    return RunConfig(
        family=draw(st.one_of(st.none(), st.sampled_from(sorted(FAMILIES)))),
        lambda0=draw(sign),
        lam=draw(sign),
        radius=draw(st.one_of(st.none(), st.floats(0.01, 10.0))),
        constant_sign=draw(st.one_of(st.none(), sign)),
        charges=charges,
        fi=tuple(draw(st.lists(fin, min_size=G, max_size=G))),
        vortices=tuple(draw(st.lists(cplx, max_size=3).map(tuple)) for _ in range(F)),
        boundary=boundary,
        impurity=draw(st.sampled_from(["none", "constant", "delta"])),
        impurity_value=draw(fin),
        impurity_deltas=tuple(draw(st.lists(st.tuples(cplx, fin), max_size=2))),
        f=draw(st.one_of(st.none(), clist)),
        f_den=draw(clist),
        f1=draw(st.one_of(st.none(), clist)),
        f2=draw(st.one_of(st.none(), clist)),
        ftilde=draw(clist),
        alpha=draw(st.one_of(st.none(), fin)),
        grid_n=draw(st.integers(16, 4096)),
        tol=draw(fin),
        max_iter=draw(st.integers(1, 500)),
        damping=draw(fin),
        out_dir=draw(st.one_of(st.none(), word)),
        residual_tol=draw(st.one_of(st.none(), fin)),
        flux_tol=draw(st.one_of(st.none(), fin)),
        compare_a=draw(st.one_of(st.none(), word)),
        compare_b=draw(st.one_of(st.none(), word)),
        compare_region=draw(st.sampled_from(["all-interior", "annulus"])),
        compare_columns=tuple(draw(st.lists(st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True), max_size=3))),
    )


@settings(max_examples=200, deadline=None)
@given(cfg=run_configs())
def test_round_trip(cfg):
    assert parse_config(serialize_config(cfg)) == cfg


@given(z=cplx)
def test_complex_round_trip(z):
    assert parse_complex(format_complex(z)) == z


@pytest.mark.parametrize(
    "text,value",
    [("-0.5+0i", -0.5 + 0j), ("1.5-2.5i", 1.5 - 2.5j), ("3", 3 + 0j), ("2i", 2j), ("1e-3+1e2i", 0.001 + 100j)],
)
def test_complex_forms(text, value):
    assert parse_complex(text) == value


def test_bad_complex():
    with pytest.raises(ValueError):
        parse_complex("one")


PAIR = """\
# coupled pair
[problem]
lambda0 = 1
lambda = 1
Q = 1, -1
Q = 0, 1
r = 1, 1
vortex1 = -0.5+0i
vortex2 = 0+0i
[grid]
n = 64
"""


def test_parse_example():
    cfg = parse_config(PAIR)
    assert cfg.charges == ((1.0, -1.0), (0.0, 1.0))
    assert cfg.vortices == ((-0.5 + 0j,), (0j,))
    assert cfg.grid_n == 64
    spec = cfg.problem_spec()
    assert spec.n_flavors == 2 and spec.grid_n == 64


@pytest.mark.parametrize(
    "text,needle",
    [
        ("[problem]\nfamily = vortexy\n", "family"),
        ("[problem]\nlambda = x\n", "x.cfg:2: [problem] lambda"),
        ("[grid]\nsize = 3\n", "x.cfg:2: [grid] size: unknown key"),
        ("[nowhere]\n", "x.cfg:1: unknown section"),
        ("lambda = 1\n", "x.cfg:1: key outside any section"),
        ("[problem]\nlambda = 1\nlambda = 1\n", "x.cfg:3: [problem] lambda: duplicate key"),
        ("[problem]\nvortex3 = 0\n", "vortex3"),
        ("[problem]\nQ = 1, 0\nQ = 1\n", "Q rows"),
        ("[problem]\nr = 1, 1\n", "r has 2 entries"),
        ("[problem]\nnot a pair\n", "x.cfg:2: expected"),
    ],
)
def test_errors_cite_line_and_key(text, needle):
    with pytest.raises(ConfigError) as info:
        parse_config(text, "x.cfg")
    assert needle in str(info.value)


def test_named_family_fixes_signs():
    cfg = parse_config("[problem]\nfamily = popov\nlambda0 = 1\n")
    assert cfg.signs() == (-1, -1)
    assert cfg.surface().radius_cutoff == 4.0
