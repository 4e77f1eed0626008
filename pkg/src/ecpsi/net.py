"""Length-prefixed TCP transport for the protocol's request/response step.

Framing is a u32 little-endian byte length followed by the payload. A
payload is either a wire message (magic "PSI1") or a service-level error
("PSIE" | u8 code | u32 text length | UTF-8 text). Errors answer bad input
without dropping the connection, so a client can retry on the same socket.

The server holds one ServerState, processes requests read-only, and keeps a
single mutable value: the request counter behind the rate limit. Once
max_requests responses have been served under the current key, further
requests get ERR_RATE_LIMITED until the operator rotates the key by
re-running setup.
"""

from __future__ import annotations

import socket
import socketserver
import struct
import threading

from .errors import (
    InvalidPoint,
    MalformedMessage,
    PsiError,
    RateLimited,
    RevealModeMismatch,
    TooManyElements,
)
from .protocol import ServerState, server_process_request
from .wire import RequestMessage, decode_message, encode_message

MAX_FRAME = 64 * 1024 * 1024
ERROR_MAGIC = b"PSIE"

ERR_MALFORMED = 1
ERR_RATE_LIMITED = 2
ERR_PROTOCOL = 3

_LEN = struct.Struct("<I")
_ERR_HEAD = struct.Struct("<4sBI")


class ServiceError(PsiError):
    """An error frame received from the demo service."""

    def __init__(self, code: int, message: str):
        super().__init__("service error %d: %s" % (code, message))
        self.code = code
        self.message = message


def encode_error(code: int, message: str) -> bytes:
    text = message.encode("utf-8")
    return _ERR_HEAD.pack(ERROR_MAGIC, code, len(text)) + text


def decode_error(payload: bytes) -> ServiceError | None:
    """Return a ServiceError if the payload is an error frame, else None."""
    if len(payload) < _ERR_HEAD.size or payload[:4] != ERROR_MAGIC:
        return None
    _, code, text_len = _ERR_HEAD.unpack_from(payload)
    text = payload[_ERR_HEAD.size:_ERR_HEAD.size + text_len]
    return ServiceError(code, text.decode("utf-8", errors="replace"))


def write_frame(sock: socket.socket, payload: bytes) -> None:
    sock.sendall(_LEN.pack(len(payload)) + payload)


def read_frame(sock: socket.socket) -> bytes | None:
    """Read one frame; None on clean EOF before a length prefix."""
    head = _read_exact(sock, _LEN.size)
    if head is None:
        return None
    (length,) = _LEN.unpack(head)
    if length > MAX_FRAME:
        raise MalformedMessage("frame of %d bytes exceeds the %d cap" % (length, MAX_FRAME))
    payload = _read_exact(sock, length)
    if payload is None:
        raise MalformedMessage("connection closed mid-frame")
    return payload


def _read_exact(sock: socket.socket, n: int) -> bytes | None:
    chunks = bytearray()
    while len(chunks) < n:
        block = sock.recv(n - len(chunks))
        if not block:
            return None
        chunks.extend(block)
    return bytes(chunks)


class PsiServer(socketserver.ThreadingTCPServer):
    """Demo service: one ServerState, one rate-limit counter, many clients."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], state: ServerState,
                 max_requests: int | None = None):
        self.state = state
        self.max_requests = max_requests
        self._served = 0
        self._counter_lock = threading.Lock()
        super().__init__(address, _Handler)

    def _take_slot(self) -> bool:
        """Atomically claim one request slot; False once the budget is spent."""
        with self._counter_lock:
            if self.max_requests is not None and self._served >= self.max_requests:
                return False
            self._served += 1
            return True

    @property
    def requests_served(self) -> int:
        with self._counter_lock:
            return self._served


class _Handler(socketserver.BaseRequestHandler):
    def handle(self):
        sock = self.request
        server: PsiServer = self.server
        while True:
            try:
                payload = read_frame(sock)
            except (MalformedMessage, OSError):
                return  # framing is unrecoverable; drop the connection
            if payload is None:
                return
            try:
                reply = self._reply_for(server, payload)
            except Exception as exc:  # keep the service alive no matter what
                reply = encode_error(ERR_PROTOCOL, "internal error: %s" % exc)
            try:
                write_frame(sock, reply)
            except OSError:
                return

    @staticmethod
    def _reply_for(server: PsiServer, payload: bytes) -> bytes:
        try:
            message = decode_message(payload)
        except MalformedMessage as exc:
            return encode_error(ERR_MALFORMED, str(exc))
        if not isinstance(message, RequestMessage):
            return encode_error(ERR_MALFORMED, "service only accepts request messages")
        if not server._take_slot():
            return encode_error(
                ERR_RATE_LIMITED,
                "request budget of %d exhausted; key rotation required" % server.max_requests,
            )
        try:
            response = server_process_request(server.state, message)
        except (TooManyElements, RevealModeMismatch, InvalidPoint, MalformedMessage) as exc:
            return encode_error(ERR_PROTOCOL, str(exc))
        return encode_message(response)


def serve_forever(state: ServerState, host: str, port: int,
                  max_requests: int | None = None) -> PsiServer:
    """Start the service on a background thread; returns the bound server."""
    server = PsiServer((host, port), state, max_requests)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server


def exchange(host: str, port: int, request_bytes: bytes, timeout: float = 30.0) -> bytes:
    """Send one encoded request over TCP and return the raw response bytes.

    Raises ServiceError if the server answered with an error frame.
    """
    with socket.create_connection((host, port), timeout=timeout) as sock:
        write_frame(sock, request_bytes)
        payload = read_frame(sock)
    if payload is None:
        raise MalformedMessage("server closed the connection without replying")
    err = decode_error(payload)
    if err is not None:
        if err.code == ERR_RATE_LIMITED:
            raise RateLimited(err.message)
        raise err
    return payload
