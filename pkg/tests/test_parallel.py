# -*- coding: utf-8 -*-

import pytest
from modules.parallel import TaskRunner, split_seeds, worker_count


def square(value):
    return value * value


def picky(value):
    if value == 2:
        raise ValueError('two is not allowed')
    return value


def test_worker_count_reads_environment(monkeypatch):
    monkeypatch.delenv('SFPC_WORKERS', raising=False)
    assert worker_count() == 1
    monkeypatch.setenv('SFPC_WORKERS', '3')
    assert worker_count() == 3
    assert worker_count(5) == 5
    assert worker_count(0) == 1
    monkeypatch.setenv('SFPC_WORKERS', 'many')
    with pytest.raises(ValueError):
        worker_count()


def test_split_seeds_is_stable_and_keyed():
    first = split_seeds(7, 4)
    assert first == split_seeds(7, 4)
    assert len(set(first)) == 4
    assert split_seeds(7, 2) == first[:2]
    assert split_seeds(7, 4, 1) != first
    assert split_seeds(8, 4) != first


def test_inline_runner_captures_errors():
    results = TaskRunner(workers=1).map(picky, [1, 2, 3], 'value')
    assert [result.index for result in results] == [0, 1, 2]
    assert results[0].value == 1 and results[2].value == 3
    assert results[1].value is None
    assert results[1].error.startswith('ValueError')
    assert TaskRunner(workers=1).map(square, []) == []


def test_pool_preserves_task_order():
    tasks = list(range(12))
    results = TaskRunner(workers=2).map(square, tasks, 'square')
    assert [result.index for result in results] == tasks
    assert [result.value for result in results] == [t * t for t in tasks]
    assert all(result.error is None for result in results)
