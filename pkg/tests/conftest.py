import sys
from pathlib import Path

import pytest

import expertbank as eb

sys.path.insert(0, str(Path(__file__).parent))

from oracles import TINY_POOL


@pytest.fixture(scope="session")
def tiny_dataset():
    return eb.ExpertBankDataset(num_experts=3, pool_losses=TINY_POOL,
                                test_losses=TINY_POOL, loss_kind="zero_one",
                                provenance="tiny enumerable pool")


@pytest.fixture(scope="session")
def small_bank():
    return eb.gen_bank(eb.BankGenConfig(num_experts=6, n_pool=400, n_test=600, seed=3))


@pytest.fixture(scope="session")
def default_bank():
    return eb.gen_bank(eb.BankGenConfig())
