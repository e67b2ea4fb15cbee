import json

import pytest

from taeg.corpus import corpus_from_dict, timeline_from_dict


def sent(text, book, start, end=None):
    return {"text": text, "start": f"{book}:{start}", "end": f"{book}:{end or start}"}


@pytest.fixture
def corpus_data():
    """Two documents, 3 + 2 sentences."""
    return {
        "format_version": 1,
        "documents": [
            {
                "id": "Mark",
                "title": "Mark",
                "sentences": [
                    sent("As they approached Jerusalem, Jesus sent two disciples.", "Mark", "11:1"),
                    sent("Go to the village ahead of you.", "Mark", "11:2"),
                    sent("They brought the colt to Jesus.", "Mark", "11:7"),
                ],
            },
            {
                "id": "John",
                "title": "John",
                "sentences": [
                    sent("The great crowd took palm branches.", "John", "12:12", "12:13"),
                    sent("Jesus found a young donkey and sat on it.", "John", "12:14"),
                ],
            },
        ],
    }


@pytest.fixture
def timeline_data():
    return {
        "format_version": 1,
        "events": [
            {
                "index": 1,
                "title": "Preparations for the entry",
                "spans": {"Mark": {"start": "Mark:11:1", "end": "Mark:11:6"}},
            },
            {
                "index": 2,
                "title": "The Triumphal Entry",
                "spans": {
                    "Mark": {"start": "Mark:11:7", "end": "Mark:11:10"},
                    "John": {"start": "John:12:12", "end": "John:12:15"},
                },
            },
            {"index": 3, "title": "Nobody tells this", "spans": {}},
        ],
    }


@pytest.fixture
def docs(corpus_data):
    return corpus_from_dict(corpus_data)


@pytest.fixture
def timeline(timeline_data):
    return timeline_from_dict(timeline_data)


@pytest.fixture
def write_json(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
