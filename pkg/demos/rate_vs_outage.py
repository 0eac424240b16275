"""Rate against outage budget on an error-free channel.

Sweeps the target D for the two online schemes and the random-dropout
baseline on the default Markov source, printing one row per D.
"""

import argparse

from occomp.harness import RunConfig, run_episode


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid = [round(0.1 * k, 1) for k in range(10)]
    schemes = ("ocsc", "ocrdc", "llmzip-dropout")
    print(f"{'D':>4} " + " ".join(f"{s + ' out':>20} {s + ' bits':>20}" for s in schemes))
    for D in grid:
        cells = []
        for scheme in schemes:
            cfg = RunConfig(scheme=scheme, D=D, T=args.T, seed=args.seed,
                            lambda0=10.0 if scheme == "ocrdc" else 0.1)
            _, s = run_episode(cfg, write=False)
            cells.append(f"{s['outage_rate']:20.4f} {s['R_T']:20.3f}")
        print(f"{D:4.1f} " + " ".join(cells))


if __name__ == "__main__":
    main()
