"""Network assembly, losses and metrics."""

from arnlab.network.losses import loss, metrics, persistence_mse
from arnlab.network.net import Network, NetworkConfig, forward_net

__all__ = ["Network", "NetworkConfig", "forward_net", "loss", "metrics", "persistence_mse"]
