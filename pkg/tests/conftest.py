"""Shared fixtures: the bundled corpora, loaded once per session."""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest

from compsense import load_conllu, load_nli_jsonl

FIXTURES = Path(__file__).parent / "fixtures"

CORPUS_JSONL = FIXTURES / "fixture200.jsonl"
CORPUS_CONLLU = FIXTURES / "fixture200.conllu"
SVO_JSONL = FIXTURES / "svo10.jsonl"
SVO_CONLLU = FIXTURES / "svo10.conllu"
AMOD_CONLLU = FIXTURES / "amod.conllu"
GOLDEN = FIXTURES / "golden"


@pytest.fixture(scope="session")
def corpus200():
    return list(load_nli_jsonl(CORPUS_JSONL))


@pytest.fixture(scope="session")
def corpus200_determined(corpus200):
    return [ex for ex in corpus200 if ex.gold is not None]


@pytest.fixture(scope="session")
def svo_examples():
    return list(load_nli_jsonl(SVO_JSONL))


@pytest.fixture(scope="session")
def svo_trees():
    return {t.sent_id: t for t in load_conllu(SVO_CONLLU)}


@pytest.fixture(scope="session")
def corpus200_trees():
    return {t.sent_id: t for t in load_conllu(CORPUS_CONLLU)}


def run_cli(*args, cwd=None, env=None):
    """Run the installed CLI in a fresh process."""
    return subprocess.run(
        [sys.executable, "-m", "compsense.cli", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
        env=env,
    )
