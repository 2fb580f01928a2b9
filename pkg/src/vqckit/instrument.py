"""Evolution counters.

The gradient backends advertise a strict cost structure (one forward
evolution, one reverse ket sweep, M reverse bra sweeps for the adjoint
method). These counters are incremented at the exact call sites that perform
a sweep, so tests can assert the structure instead of trusting it.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field


@dataclass
class SweepCounters:
    forward_sweeps: int = 0
    reverse_ket_sweeps: int = 0
    reverse_bra_sweeps: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def reset(self) -> None:
        with self._lock:
            self.forward_sweeps = 0
            self.reverse_ket_sweeps = 0
            self.reverse_bra_sweeps = 0

    def add_forward(self, n: int = 1) -> None:
        with self._lock:
            self.forward_sweeps += n

    def add_reverse(self, ket: int, bra: int) -> None:
        with self._lock:
            self.reverse_ket_sweeps += ket
            self.reverse_bra_sweeps += bra

    def snapshot(self) -> tuple[int, int, int]:
        with self._lock:
            return (self.forward_sweeps, self.reverse_ket_sweeps,
                    self.reverse_bra_sweeps)


# process-wide counters; reset() before a measured region
sweep_counters = SweepCounters()
