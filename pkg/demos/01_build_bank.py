"""Build the default synthetic expert bank and look at its geometry.

The generator draws 25 binary loss columns whose marginal error rates
climb linearly from 0.08 to 0.11 and whose pairwise disagreement sits
inside [0.06, 0.10], mimicking an ensemble of similarly-accurate but
non-identical classifiers.
"""

import os
import tempfile

import numpy as np

import expertbank as eb


def main():
    config = eb.BankGenConfig()
    print("generator config:", config)

    bank = eb.gen_bank(config)
    print("pool matrix:", bank.pool_losses.shape)
    print("test matrix:", bank.test_losses.shape)

    rates = bank.test_errors()
    print("\nper-expert test error: min=%.4f max=%.4f" % (rates.min(), rates.max()))
    print("targets were linspace(%.2f, %.2f, %d)"
          % (config.error_rate_low, config.error_rate_high, config.num_experts))

    d = eb.disagreement_matrix(bank)
    off = ~np.eye(config.num_experts, dtype=bool)
    print("pairwise disagreement: min=%.4f max=%.4f (window 0.06..0.10)"
          % (d[off].min(), d[off].max()))

    predicted = eb.expected_disagreement(config)
    gap = np.abs(d[off] - predicted[off]).max()
    print("worst |observed - analytic| disagreement: %.4f" % gap)

    out = os.path.join(tempfile.mkdtemp(prefix="expertbank_"), "default_bank")
    eb.save_dataset(bank, out)
    back = eb.load_dataset(out)
    assert np.array_equal(back.pool_losses, bank.pool_losses)
    print("\nsaved and reloaded losslessly under %s" % out)


if __name__ == "__main__":
    main()
