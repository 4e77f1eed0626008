"""Asymmetric private set intersection / cardinality over P-256.

A client learns which of its n elements appear in a server's N-element set
(or only how many), the server learns nothing about the client's set, and
the one-time setup transfer is a compressed structure (Bloom filter or
Golomb-compressed set) instead of N raw values.

Typical in-process use:

    from ecpsi import server_setup, client_create_request, \\
        server_process_request, client_process_response

    state, setup = server_setup(server_elements, max_client_queries=1000,
                                total_fp=1e-9, structure="bloom")
    cstate, request = client_create_request(client_elements,
                                            reveal_intersection=True)
    response = server_process_request(state, request)
    result = client_process_response(cstate, setup, response)
    result.indices   # positions of the client's elements found server-side

The `ecpsi` CLI exposes the same steps over files and a TCP demo service;
see the README and docs/wire-format.md for the byte-level contracts.
"""

from .bloom import BloomFilter
from .errors import (
    CountMismatch,
    InvalidParameters,
    InvalidPoint,
    MalformedMessage,
    PsiError,
    RateLimited,
    RevealModeMismatch,
    StateAlreadyUsed,
    TooManyElements,
)
from .gcs import GolombCompressedSet
from .group import (
    GroupElement,
    Scalar,
    backend_name,
    decode_element,
    encode_element,
    exp,
    hash_to_group,
    invert_scalar,
    random_scalar,
)
from .protocol import (
    ClientState,
    IntersectionResult,
    ServerState,
    client_create_request,
    client_process_response,
    rotate_key,
    server_process_request,
    server_setup,
)
from .wire import (
    RequestMessage,
    ResponseMessage,
    SetupMessage,
    decode_message,
    encode_message,
)

__version__ = "0.1.0"

__all__ = [
    "BloomFilter",
    "ClientState",
    "CountMismatch",
    "GolombCompressedSet",
    "GroupElement",
    "IntersectionResult",
    "InvalidParameters",
    "InvalidPoint",
    "MalformedMessage",
    "PsiError",
    "RateLimited",
    "RequestMessage",
    "ResponseMessage",
    "RevealModeMismatch",
    "Scalar",
    "ServerState",
    "SetupMessage",
    "StateAlreadyUsed",
    "TooManyElements",
    "backend_name",
    "client_create_request",
    "client_process_response",
    "decode_element",
    "decode_message",
    "encode_element",
    "encode_message",
    "exp",
    "hash_to_group",
    "invert_scalar",
    "random_scalar",
    "rotate_key",
    "server_process_request",
    "server_setup",
    "__version__",
]
