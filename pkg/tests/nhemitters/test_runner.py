import pytest

from nhemitters.runner import ScenarioRunner


def square(value, offset=0):
    return value * value + offset


def test_single_job_keeps_order():
    assert ScenarioRunner().run(square, [3, 1, 2]) == [9, 1, 4]
    assert ScenarioRunner(1).run(square, [3, 1], 1) == [10, 2]


def test_worker_processes():
    assert ScenarioRunner(2).run(abs, [-3, 4, -5, 0]) == [3, 4, 5, 0]


def test_jobs_must_be_positive():
    with pytest.raises(ValueError):
        ScenarioRunner(0)


def test_run_leaves_no_loop_behind():
    runner = ScenarioRunner()
    runner.run(square, [1])
    assert runner._loop is None


@pytest.mark.asyncio
async def test_map_on_a_running_loop(event_loop):
    runner = ScenarioRunner(1, loop=event_loop)
    assert await runner.map(square, [2, 5], 1) == [5, 26]
    assert await runner.map(square, []) == []
