# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
精化缓存

按精度记忆预言机的包围区间。精度 p' ≥ p 的区间同样满足精度 p 的请求，
所以查找返回不低于请求精度的最粗缓存项。分片搜索的工作线程共享同一个预言机。
"""

import bisect
import threading
from collections import OrderedDict
from typing import Any


class RefinementCache:
    """精度 → 包围区间的线程安全 LRU 缓存

    使用示例：
        cache = RefinementCache(max_size=64)
        cache.put(128, enclosure)
        hit, value = cache.get(64)   # 命中：128 位的区间也满足 64 位
    """

    def __init__(self, max_size: int = 64):
        self.max_size = max_size
        self._entries: OrderedDict[int, Any] = OrderedDict()
        self._precisions: list[int] = []  # 已缓存精度，升序
        self._lock = threading.Lock()
        self._hits = 0
        self._misses = 0

    def get(self, p: int) -> tuple[bool, Any]:
        """取精度不低于 p 的最粗缓存项

        Returns:
            (是否命中, 区间)
        """
        with self._lock:
            i = bisect.bisect_left(self._precisions, p)
            if i == len(self._precisions):
                self._misses += 1
                return False, None
            key = self._precisions[i]
            self._entries.move_to_end(key)
            self._hits += 1
            return True, self._entries[key]

    def put(self, p: int, value: Any) -> None:
        with self._lock:
            if p in self._entries:
                self._entries.move_to_end(p)
                self._entries[p] = value
                return
            if len(self._entries) >= self.max_size:
                oldest, _ = self._entries.popitem(last=False)
                self._precisions.remove(oldest)
            self._entries[p] = value
            bisect.insort(self._precisions, p)

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()
            self._precisions.clear()
            self._hits = 0
            self._misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def finest(self) -> int | None:
        """已缓存的最高精度"""
        return self._precisions[-1] if self._precisions else None

    @property
    def stats(self) -> dict[str, Any]:
        total = self._hits + self._misses
        return {
            "size": len(self._entries),
            "max_size": self.max_size,
            "hits": self._hits,
            "misses": self._misses,
            "hit_rate": self._hits / total if total > 0 else 0,
        }
