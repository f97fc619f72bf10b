import pytest

from telab.services.pool import WorkerPool


@pytest.mark.parametrize("threads", [1, 2])
async def test_results_keep_task_order(threads):
    async with WorkerPool(threads) as pool:
        assert await pool.map(abs, [-3, 1, -2, 5]) == [3, 1, 2, 5]


async def test_empty_task_list():
    async with WorkerPool(2) as pool:
        assert await pool.map(abs, []) == []


async def test_single_thread_has_no_executor():
    pool = WorkerPool(1)
    async with pool:
        assert pool._executor is None
    assert pool.threads == 1


async def test_close_releases_executor():
    pool = WorkerPool(2)
    async with pool:
        assert pool._executor is not None
    assert pool._executor is None
