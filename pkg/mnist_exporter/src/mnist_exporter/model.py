"""A small MNIST CNN and a fully reproducible training loop.

All randomness (parameter init, batch order) is drawn from a caller-supplied
numpy Generator rather than torch's global RNG, and torch runs single
threaded inside the training loop.  Training the same candidate twice, in
the same process or in different worker processes, therefore produces
bit-identical parameters and predictions.
"""

import numpy as np
import torch
from torch import nn


def build_cnn():
    """Two conv blocks (16 and 32 filters, each max-pooled), then 64 -> 10."""
    return nn.Sequential(
        nn.Conv2d(1, 16, kernel_size=3, padding=1),
        nn.ReLU(),
        nn.MaxPool2d(2),
        nn.Conv2d(16, 32, kernel_size=3, padding=1),
        nn.ReLU(),
        nn.MaxPool2d(2),
        nn.Flatten(),
        nn.Linear(32 * 7 * 7, 64),
        nn.ReLU(),
        nn.Linear(64, 10),
    )


def _uniform_tensor(rng, shape, bound):
    draw = rng.uniform(-bound, bound, size=shape)
    return torch.from_numpy(draw.astype(np.float32))


def init_parameters(model, rng):
    """Fill conv and linear layers with uniform(-1/sqrt(fan_in), ...) draws.

    The bound matches the framework's own default scheme, but the numbers
    come from ``rng`` so that initialization is reproducible independent of
    process, thread count, and any torch global state.
    """
    with torch.no_grad():
        for layer in model.modules():
            if isinstance(layer, nn.Conv2d):
                fan_in = layer.in_channels * layer.kernel_size[0] * layer.kernel_size[1]
            elif isinstance(layer, nn.Linear):
                fan_in = layer.in_features
            else:
                continue
            bound = 1.0 / float(np.sqrt(fan_in))
            layer.weight.copy_(_uniform_tensor(rng, tuple(layer.weight.shape), bound))
            if layer.bias is not None:
                layer.bias.copy_(_uniform_tensor(rng, tuple(layer.bias.shape), bound))
    return model


def _to_inputs(images):
    """uint8 (n, 28, 28) images to a float32 (n, 1, 28, 28) tensor in [0, 1]."""
    arr = np.ascontiguousarray(images, dtype=np.float32) / 255.0
    return torch.from_numpy(arr).unsqueeze(1)


def train_candidate(images, labels, rng, epochs=1, learning_rate=1e-3,
                    batch_size=64):
    """Train one CNN on the given images and return it in eval mode."""
    if len(images) != len(labels):
        raise ValueError("images and labels disagree on length")
    if len(images) == 0:
        raise ValueError("cannot train on an empty subset")
    torch.set_num_threads(1)
    x = _to_inputs(images)
    y = torch.from_numpy(np.ascontiguousarray(labels, dtype=np.int64))
    model = build_cnn()
    init_parameters(model, rng)
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    n = len(images)
    for _ in range(int(epochs)):
        order = torch.from_numpy(rng.permutation(n))
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            optimizer.zero_grad()
            loss = loss_fn(model(x[idx]), y[idx])
            loss.backward()
            optimizer.step()
    model.eval()
    return model


def predict_labels(model, images, batch_size=1024):
    """Predicted class labels for uint8 images, as an int64 numpy array."""
    torch.set_num_threads(1)
    x = _to_inputs(images)
    out = np.empty(len(images), dtype=np.int64)
    model.eval()
    with torch.no_grad():
        for start in range(0, len(images), batch_size):
            chunk = x[start:start + batch_size]
            out[start:start + batch_size] = model(chunk).argmax(dim=1).numpy()
    return out
