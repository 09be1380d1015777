"""
Async/sync bridging for the artifact store
"""

import asyncio
import threading
from typing import Awaitable, TypeVar

T = TypeVar('T')


def sync_wrapper(coro: Awaitable[T]) -> T:
    """
    Run a coroutine to completion from synchronous code.

    Uses asyncio.run when no loop is running; inside a running loop the
    coroutine runs on a private loop in a worker thread.
    """
    try:
        asyncio.get_running_loop()
    except RuntimeError:
        return asyncio.run(coro)
    return _run_in_thread(coro)


def _run_in_thread(coro: Awaitable[T]) -> T:
    result = {}

    def target():
        loop = asyncio.new_event_loop()
        try:
            result["value"] = loop.run_until_complete(coro)
        except BaseException as e:
            result["error"] = e
        finally:
            loop.close()

    thread = threading.Thread(target=target)
    thread.start()
    thread.join()
    if "error" in result:
        raise result["error"]
    return result["value"]
