import random

import pytest
from hypothesis import given, settings, strategies as st

from slicefft.conv import REGFILE_SIZE, ConvEngine, run
from slicefft.errors import SizeError
from slicefft.fixedpoint import wrap_raw
from slicefft.golden import direct_conv

samples16 = st.integers(-32768, 32767)


def test_load_resets_state():
    eng = ConvEngine()
    eng.load([1], [1])
    assert len(eng.input_fifo) == 1 and len(eng.kernel_fifo) == 1
    assert eng.regfile == [0] * REGFILE_SIZE
    assert not eng.rcv and eng.cycle == 0


@pytest.mark.parametrize("x, h", [([1] * 16, [1]), ([1], [1] * 16), ([], [1]), ([1], [])])
def test_load_size_gate(x, h):
    with pytest.raises(SizeError):
        ConvEngine().load(x, h)


def test_accumulator_for_t1():
    eng = ConvEngine()
    eng.load([1, 2, 3], [1, 1])
    while not eng.finished:
        eng.step()
    # y[1] = 1*1 + 2*1
    assert eng.regfile[1] == 3


def test_single_product_emits_same_cycle():
    eng = ConvEngine()
    eng.load([7], [-3])
    rep = eng.step()
    assert rep.products_routed == [(0, -21)]
    assert rep.rcv and rep.emitted == (0, -21)
    assert eng.finished
    term = eng.step()
    assert term.terminal and not term.rcv and eng.cycle == 1


def test_zero_input():
    res = run([0, 0], [5, 7], keep_trace=True)
    assert res.y == [0, 0, 0]
    assert all(v == 0 for rep in res.trace for _, v in rep.products_routed)


def test_run_examples():
    assert run([1, 2, 3], [1, 1]).y == [1, 3, 5, 3]
    h = [4, -9, 2]
    assert run([0, 0, 0, 0, 1], h).y == [0, 0, 0, 0] + h
    assert run([1], h).y == h


def test_rcv_count_and_order():
    res = run(list(range(1, 16)), list(range(-7, 8)), keep_trace=True)
    emitted = [rep.emitted for rep in res.trace if rep.rcv]
    assert len(emitted) == 29
    assert [t for t, _ in emitted] == list(range(29))
    assert res.cycles_used == 29
    assert all(rep.rcv == (rep.emitted is not None) for rep in res.trace)


def test_spare_registers_stay_zero():
    eng = ConvEngine()
    eng.load([32767] * 15, [32767] * 15)
    while not eng.finished:
        eng.step()
    assert eng.regfile[29:] == [0, 0, 0]


def test_overflow_wraps_and_flags():
    x = [-32768] * 15
    res = run(x, x)
    exact = direct_conv(x, x)
    assert res.y == [wrap_raw(v, 32) for v in exact]
    assert res.overflow_any


@settings(max_examples=60, deadline=None)
@given(st.lists(samples16, min_size=1, max_size=15), st.lists(samples16, min_size=1, max_size=15))
def test_matches_oracle_mod_2_32(x, h):
    res = run(x, h)
    exact = direct_conv(x, h)
    assert res.y == [wrap_raw(v, 32) for v in exact]
    if any(wrap_raw(v, 32) != v for v in exact):
        assert res.overflow_any
    assert len(res.y) == len(x) + len(h) - 1


@settings(max_examples=40, deadline=None)
@given(st.lists(samples16, min_size=1, max_size=15), st.lists(samples16, min_size=1, max_size=15))
def test_commutative(x, h):
    assert run(x, h).y == run(h, x).y


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(-1000, 1000), min_size=1, max_size=15),
    st.integers(1, 15).flatmap(
        lambda m: st.tuples(
            st.lists(st.integers(-1000, 1000), min_size=m, max_size=m),
            st.lists(st.integers(-1000, 1000), min_size=m, max_size=m),
        )
    ),
)
def test_linear_in_kernel(x, hs):
    h1, h2 = hs
    lhs = run(x, [a + b for a, b in zip(h1, h2)]).y
    rhs = [a + b for a, b in zip(run(x, h1).y, run(x, h2).y)]
    assert lhs == rhs


def test_distinct_engines_are_independent():
    rng = random.Random(5)
    a, b = ConvEngine(), ConvEngine()
    xa = [rng.randint(-99, 99) for _ in range(6)]
    xb = [rng.randint(-99, 99) for _ in range(9)]
    a.load(xa, [1, 2])
    b.load(xb, [3])
    out_a, out_b = [], []
    while not (a.finished and b.finished):
        ra, rb = a.step(), b.step()
        if ra.emitted:
            out_a.append(ra.emitted[1])
        if rb.emitted:
            out_b.append(rb.emitted[1])
    assert out_a == direct_conv(xa, [1, 2])
    assert out_b == direct_conv(xb, [3])
