"""Trace the routing rate-distortion curve of the default bank.

An input-dependent gate can route every item to its personal best
expert (high routing information, low loss) or collapse onto the single
best expert (zero information, higher loss).  Sweeping the multiplier
lambda between those extremes traces the achievable frontier.
"""

import numpy as np

import expertbank as eb


def main():
    bank = eb.gen_bank(eb.BankGenConfig())
    losses = bank.test_losses[:2000]
    print("routing over %d items x %d experts" % losses.shape)

    best_single = losses.mean(axis=0).min()
    oracle = losses.min(axis=1).mean()
    print("best single expert loss : %.4f (rate 0)" % best_single)
    print("per-item oracle loss    : %.4f (max useful rate)" % oracle)

    points = eb.rd_sweep(losses, eb.default_lambda_grid(), threads=4)

    print("\n%10s %10s %10s %6s %5s" % ("lambda", "rate", "distortion", "iters", "conv"))
    for p in points:
        print("%10.4g %10.6f %10.6f %6d %5s"
              % (p.lam, p.rate, p.distortion, p.iterations, p.converged))

    rates = np.array([p.rate for p in points])
    dists = np.array([p.distortion for p in points])
    assert np.all(np.diff(dists) <= 1e-9), "curve must be nonincreasing"
    print("\nrate spans %.2e .. %.4f nats (log R = %.4f)"
          % (rates.min(), rates.max(), np.log(losses.shape[1])))
    print("distortion falls %.4f -> %.4f" % (dists.max(), dists.min()))


if __name__ == "__main__":
    main()
