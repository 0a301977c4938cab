"""Bridge process speaking the spinbeam QUBO exchange protocol.

Offline it answers from spinbeam's own samplers; with a credential in the
environment it submits to a quantum annealer through the vendor SDK.
"""

from qa_bridge.device import classify_error, sample_on_device, timing_table
from qa_bridge.service import BridgeConfig, serve_once
from qa_bridge.wire import (
    ParseError,
    Request,
    parse_request,
    render_error,
    render_response,
)

__version__ = "0.1.0"

__all__ = [
    "BridgeConfig",
    "ParseError",
    "Request",
    "classify_error",
    "parse_request",
    "render_error",
    "render_response",
    "sample_on_device",
    "serve_once",
    "timing_table",
    "__version__",
]
