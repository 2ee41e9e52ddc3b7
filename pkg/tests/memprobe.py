"""Peak-RSS probe run in a fresh interpreter: ``python memprobe.py M N MODE``.

Prints one JSON object with the resident-set baseline (after imports and a
warm-up run) and the peak after generating and solving one instance.
"""

import json
import resource
import sys

from arcmatch.engine import EngineConfig, naps
from arcmatch.instances import bench_instance


def peak_kib() -> int:
    # VmHWM belongs to this address space; ru_maxrss would also carry the
    # parent's peak across fork/exec
    try:
        with open("/proc/self/status") as fh:
            for line in fh:
                if line.startswith("VmHWM:"):
                    return int(line.split()[1])
    except OSError:
        pass
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss


def main() -> None:
    m, n, mode = int(sys.argv[1]), int(sys.argv[2]), sys.argv[3]
    cfg = EngineConfig(mode=mode)
    naps(*bench_instance(m, 2000, seed=1), cfg)
    base = peak_kib()
    P, Q = bench_instance(m, n, seed=0)
    res = naps(P, Q, cfg)
    print(
        json.dumps(
            {
                "m": m,
                "n": n,
                "mode": mode,
                "baseline_kib": base,
                "peak_kib": peak_kib(),
                "peak_gamma_bits": res.stats.peak_gamma_bits,
                "tree_arcs": res.text_arcs,
                "lightdepth_max": res.lightdepth_max,
                "peak_live_gamma": res.stats.peak_live_gamma,
            }
        )
    )


if __name__ == "__main__":
    main()
