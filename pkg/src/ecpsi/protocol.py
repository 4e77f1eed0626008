"""Two-party intersection protocol: server setup/response, client request/result.

Flow, with H = hash_to_group and all exponents secret:

  server setup    k random; every set element x becomes H(x)^k; the
                  encodings of those points go into a compressed set
                  (Bloom filter or Golomb-compressed set) sized for the
                  client's query allowance; that structure is the entire
                  setup message.
  client request  r random, single use; element y becomes H(y)^r, sent in
                  input order together with the reveal flag.
  server response each received point m becomes m^k. Order: the client's
                  input order when the intersection is revealed, ascending
                  byte order of the encodings otherwise - sorting is what
                  prevents the client from mapping answers back to its
                  inputs, so a cardinality-only response leaks positions of
                  nothing.
  client result   each response point is raised to 1/r, which cancels the
                  blind and leaves H(y)^k, directly comparable against the
                  setup structure. Membership per position (reveal) or a
                  bare count (cardinality mode).

Completeness is exact: an element in both sets is always reported. The only
error direction is false positives, bounded by the structure's total_fp
budget over max_queries lookups.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bloom import BloomFilter
from .errors import (
    CountMismatch,
    InvalidParameters,
    RevealModeMismatch,
    StateAlreadyUsed,
    TooManyElements,
)
from .gcs import GolombCompressedSet
from .group import GroupElement, Scalar, exp, hash_to_group, invert_scalar, random_scalar
from .wire import RequestMessage, ResponseMessage, SetupMessage

STRUCTURES = ("bloom", "gcs")


@dataclass
class ServerState:
    """Per-key server state. Immutable after setup; sharable across threads.

    The key never appears in any outbound message; compressed_set is the
    same structure the client received (None when rehydrated from a key
    file, since answering requests does not need it).
    """

    key: Scalar
    dataset_size: int
    max_queries: int
    total_fp: float
    ds_type: str
    compressed_set: BloomFilter | GolombCompressedSet | None = None
    pinned_reveal: bool | None = None


@dataclass
class ClientState:
    """Single-use client state: one blind, one request, one response."""

    blind: Scalar
    reveal_intersection: bool
    element_count: int
    consumed: bool = field(default=False)


@dataclass(frozen=True)
class IntersectionResult:
    """Sorted client-input positions (reveal mode) or just their count."""

    cardinality: int
    indices: tuple[int, ...] | None = None


def _encrypt(elements, key: Scalar) -> list[bytes]:
    return [exp(hash_to_group(x), key).encode() for x in elements]


def server_setup(
    elements: list[bytes],
    max_client_queries: int,
    total_fp: float,
    structure: str = "bloom",
    *,
    key: Scalar | None = None,
    pinned_reveal: bool | None = None,
) -> tuple[ServerState, SetupMessage]:
    """Run the offline phase: draw a key, encrypt the set, compress it.

    `key` is injectable for tests and reproducible fixtures only; normal
    callers let a fresh one be drawn. The output message is deterministic
    given (key, elements, parameters).
    """
    if structure not in STRUCTURES:
        raise InvalidParameters("structure must be one of %s" % (STRUCTURES,))
    if key is None:
        key = random_scalar()
    encrypted = _encrypt(elements, key)
    if structure == "bloom":
        compressed = BloomFilter.create(max(1, len(encrypted)), max_client_queries, total_fp)
        for e in encrypted:
            compressed.insert(e)
    else:
        compressed = GolombCompressedSet.build(encrypted, max_client_queries, total_fp)
    state = ServerState(
        key=key,
        dataset_size=len(elements),
        max_queries=max_client_queries,
        total_fp=total_fp,
        ds_type=structure,
        compressed_set=compressed,
        pinned_reveal=pinned_reveal,
    )
    return state, SetupMessage(compressed)


def rotate_key(
    state: ServerState,
    elements: list[bytes],
    max_client_queries: int,
    total_fp: float,
    structure: str = "bloom",
) -> tuple[ServerState, SetupMessage]:
    """Re-run setup under a fresh independent key (the old state is dead weight
    afterwards; drop it). Responses under the new key only match the new
    setup message, which is the point: it invalidates accumulated queries."""
    return server_setup(
        elements,
        max_client_queries,
        total_fp,
        structure,
        pinned_reveal=state.pinned_reveal,
    )


def client_create_request(
    elements: list[bytes],
    reveal_intersection: bool,
    *,
    blind: Scalar | None = None,
) -> tuple[ClientState, RequestMessage]:
    """Blind the client's elements in input order. Duplicates are kept:
    position i of the request always corresponds to input element i."""
    if blind is None:
        blind = random_scalar()
    points = [exp(hash_to_group(y), blind).encode() for y in elements]
    state = ClientState(blind, reveal_intersection, len(points))
    return state, RequestMessage(reveal_intersection, points)


def server_process_request(state: ServerState, request: RequestMessage) -> ResponseMessage:
    """Exponentiate every request point with the server key.

    Rejects requests larger than the provisioned allowance (the
    false-positive budget is void beyond it) and, if the state pins a
    reveal mode, requests asking for the other mode.
    """
    if len(request.elements) > state.max_queries:
        raise TooManyElements(
            "request has %d elements, setup allows %d"
            % (len(request.elements), state.max_queries)
        )
    if state.pinned_reveal is not None and request.reveal_intersection != state.pinned_reveal:
        raise RevealModeMismatch(
            "server pins reveal=%s" % state.pinned_reveal
        )
    out = [exp(GroupElement.decode(m), state.key).encode() for m in request.elements]
    if not request.reveal_intersection:
        out.sort()  # stable byte-lexicographic: duplicates keep relative order
    return ResponseMessage(out)


def client_process_response(
    state: ClientState, setup: SetupMessage, response: ResponseMessage
) -> IntersectionResult:
    """Unblind the response and compare against the setup structure.

    Consumes the client state: a state that produced a result refuses any
    further response (single-use blind).
    """
    if state.consumed:
        raise StateAlreadyUsed("this client state already produced a result")
    if len(response.elements) != state.element_count:
        raise CountMismatch(
            "response has %d elements, request had %d"
            % (len(response.elements), state.element_count)
        )
    unblind = invert_scalar(state.blind)
    values = [exp(GroupElement.decode(m), unblind).encode() for m in response.elements]
    flags = setup.structure.contains_many(values)
    state.consumed = True
    if state.reveal_intersection:
        indices = tuple(i for i, hit in enumerate(flags) if hit)
        return IntersectionResult(cardinality=len(indices), indices=indices)
    return IntersectionResult(cardinality=sum(flags))
