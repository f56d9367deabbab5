"""Shared quivers and cached pipelines (weight truncation 4)."""
from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import pytest

from ginzburg_ainf.ar_mesh import knit, nakayama_and_N
from ginzburg_ainf.ginzburg import build_ginzburg, truncate_dg
from ginzburg_ainf.quiver import parse_quiver
from ginzburg_ainf.transfer import Retraction, transfer

QUIVER_DIR = Path(__file__).resolve().parent.parent / "quivers"

TEXT = {
    "A2": "vertex 1\nvertex 2\narrow a: 2 -> 1\n",
    "A3": "vertex 1\nvertex 2\nvertex 3\narrow a: 3 -> 2\narrow b: 2 -> 1\n",
    "D4": "vertex 1\nvertex 2\nvertex 3\nvertex 4\narrow a: 1 -> 4\narrow b: 2 -> 4\narrow c: 3 -> 4\n",
    "K2": "vertex 1\nvertex 2\narrow a: 1 -> 2\narrow b: 1 -> 2\n",
    "K3": "vertex 1\nvertex 2\narrow a: 1 -> 2\narrow b: 1 -> 2\narrow c: 1 -> 2\n",
    "A4": "vertex 1\nvertex 2\nvertex 3\nvertex 4\narrow a: 1 -> 2\narrow b: 3 -> 2\narrow c: 3 -> 4\n",
}


def quiver(name: str):
    return parse_quiver(TEXT[name])


@lru_cache(maxsize=None)
def complex_(name: str, w: int = 4):
    return truncate_dg(build_ginzburg(quiver(name)), w, verify=False)


@lru_cache(maxsize=None)
def retraction(name: str, w: int = 4, reverse: bool = False):
    return Retraction(complex_(name, w), reverse=reverse)


@lru_cache(maxsize=None)
def table(name: str, w: int = 4, n: int = 6):
    return transfer(complex_(name, w), retraction(name, w), n)


@lru_cache(maxsize=None)
def dynkin(name: str):
    return nakayama_and_N(quiver(name))


@lru_cache(maxsize=None)
def fragment(name: str, depth: int | None = None):
    return knit(quiver(name), dynkin(name).depth if depth is None else depth)


@lru_cache(maxsize=None)
def gauged(name: str, w: int = 4, n: int = 6):
    from ginzburg_ainf.translation import u_equivariant_gauge, u_generator_labels

    t = table(name, w, n)
    return u_equivariant_gauge(t, u_generator_labels(t, dynkin(name)).values())


@pytest.fixture(scope="session")
def quiver_dir() -> Path:
    return QUIVER_DIR


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
