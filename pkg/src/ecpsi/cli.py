"""Command-line interface.

Subcommands cover the whole protocol surface as flat file/byte operations,
which is also the boundary foreign-language wrappers call through:

  setup    offline phase: element file -> setup message file + key file
  serve    long-running TCP responder bound to a key file
  query    one-shot client against a running server
  request  client step 1: element file -> request file + client state file
  respond  server online step: request file -> response file (needs key file)
  finish   client final step: state + setup + response -> result
  bench    timing/size harness, including the FP-rate size sweep (--sizes)

Element files are newline-delimited: lines are split on '\n' only and
hashed as raw bytes, no normalization; a trailing newline does not add an
element. Exit codes: 0 ok, 1 usage/parameters, 2 protocol error, 3 IO or
network failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import net
from .bench import BenchConfig, run_bench, sizes_machine_lines, sizes_table_text, table_sizes
from .errors import InvalidParameters, PsiError
from .group import Scalar
from .protocol import (
    ClientState,
    ServerState,
    client_create_request,
    client_process_response,
    server_process_request,
    server_setup,
)
from .wire import RequestMessage, ResponseMessage, SetupMessage, decode_message, encode_message

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PROTOCOL = 2
EXIT_IO = 3

KEY_FORMAT = "ecpsi-key"
STATE_FORMAT = "ecpsi-client-state"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.print_usage(sys.stderr)
        raise _Usage(message)


class _Usage(Exception):
    pass


def read_elements(path: str) -> list[bytes]:
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = raw.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    return lines


def _write_private(path: str, payload: dict) -> None:
    data = json.dumps(payload, indent=2).encode()
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
    try:
        os.write(fd, data + b"\n")
    finally:
        os.close(fd)
    os.chmod(path, 0o600)  # in case the file pre-existed with wider permissions


def _load_json(path: str, expected_format: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != expected_format:
        raise InvalidParameters("%s is not a %s file" % (path, expected_format))
    return payload


def load_server_state(path: str) -> ServerState:
    payload = _load_json(path, KEY_FORMAT)
    return ServerState(
        key=Scalar.from_bytes(bytes.fromhex(payload["key"])),
        dataset_size=payload["dataset_size"],
        max_queries=payload["max_queries"],
        total_fp=payload["fpr"],
        ds_type=payload["ds"],
        compressed_set=None,
        pinned_reveal=payload.get("pin_reveal"),
    )


def _parse_address(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep:
        raise InvalidParameters("address must look like HOST:PORT, got %r" % text)
    return host or "127.0.0.1", int(port)


def _parse_pin(value: str | None) -> bool | None:
    if value is None:
        return None
    return value == "true"


def cmd_setup(args) -> int:
    elements = read_elements(args.server_set)
    key = None
    if args.key_in:
        key = Scalar.from_bytes(bytes.fromhex(_load_json(args.key_in, KEY_FORMAT)["key"]))
    state, setup_msg = server_setup(
        elements, args.max_queries, args.fpr, args.ds,
        key=key, pinned_reveal=_parse_pin(args.pin_reveal),
    )
    with open(args.out, "wb") as fh:
        fh.write(encode_message(setup_msg))
    _write_private(args.key_out, {
        "format": KEY_FORMAT,
        "version": 1,
        "key": state.key.to_bytes().hex(),
        "dataset_size": state.dataset_size,
        "max_queries": state.max_queries,
        "fpr": state.total_fp,
        "ds": state.ds_type,
        "pin_reveal": state.pinned_reveal,
    })
    print("setup written: %s (%d elements, ds=%s); key: %s"
          % (args.out, state.dataset_size, state.ds_type, args.key_out))
    return EXIT_OK


def cmd_serve(args) -> int:
    state = load_server_state(args.key)
    host, port = _parse_address(args.listen)
    server = net.PsiServer((host, port), state, args.max_requests)
    actual = server.server_address
    print("listening on %s:%d" % (actual[0], actual[1]), flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def cmd_request(args) -> int:
    elements = read_elements(args.client_set)
    blind = Scalar.from_bytes(bytes.fromhex(args.blind_in)) if args.blind_in else None
    state, request_msg = client_create_request(elements, args.reveal, blind=blind)
    with open(args.out, "wb") as fh:
        fh.write(encode_message(request_msg))
    _write_private(args.state_out, {
        "format": STATE_FORMAT,
        "version": 1,
        "blind": state.blind.to_bytes().hex(),
        "reveal": state.reveal_intersection,
        "count": state.element_count,
        "consumed": False,
    })
    print("request written: %s (%d elements); state: %s"
          % (args.out, state.element_count, args.state_out))
    return EXIT_OK


def cmd_respond(args) -> int:
    state = load_server_state(args.key)
    with open(args.infile, "rb") as fh:
        request = decode_message(fh.read())
    if not isinstance(request, RequestMessage):
        raise InvalidParameters("%s does not contain a request message" % args.infile)
    response = server_process_request(state, request)
    with open(args.out, "wb") as fh:
        fh.write(encode_message(response))
    print("response written: %s (%d elements)" % (args.out, len(response.elements)))
    return EXIT_OK


def _print_result(result, as_json: bool) -> None:
    if as_json:
        if result.indices is not None:
            print(json.dumps({"indices": list(result.indices)}))
        else:
            print(json.dumps({"cardinality": result.cardinality}))
    elif result.indices is not None:
        for idx in result.indices:
            print(idx)
    else:
        print(result.cardinality)


def _finish(state_path: str, setup_bytes: bytes, response_bytes: bytes, as_json: bool) -> int:
    payload = _load_json(state_path, STATE_FORMAT)
    state = ClientState(
        blind=Scalar.from_bytes(bytes.fromhex(payload["blind"])),
        reveal_intersection=payload["reveal"],
        element_count=payload["count"],
        consumed=payload.get("consumed", False),
    )
    setup = decode_message(setup_bytes)
    response = decode_message(response_bytes)
    if not isinstance(setup, SetupMessage):
        raise InvalidParameters("setup file does not contain a setup message")
    if not isinstance(response, ResponseMessage):
        raise InvalidParameters("response file does not contain a response message")
    result = client_process_response(state, setup, response)
    payload["consumed"] = True
    _write_private(state_path, payload)
    _print_result(result, as_json)
    return EXIT_OK


def cmd_finish(args) -> int:
    with open(args.setup, "rb") as fh:
        setup_bytes = fh.read()
    with open(args.response, "rb") as fh:
        response_bytes = fh.read()
    return _finish(args.state, setup_bytes, response_bytes, args.json)


def cmd_query(args) -> int:
    with open(args.setup, "rb") as fh:
        setup_bytes = fh.read()
    setup = decode_message(setup_bytes)
    if not isinstance(setup, SetupMessage):
        raise InvalidParameters("%s does not contain a setup message" % args.setup)
    elements = read_elements(args.client_set)
    state, request_msg = client_create_request(elements, args.reveal)
    host, port = _parse_address(args.connect)
    response_bytes = net.exchange(host, port, encode_message(request_msg))
    response = decode_message(response_bytes)
    if not isinstance(response, ResponseMessage):
        raise InvalidParameters("server replied with a non-response message")
    result = client_process_response(state, setup, response)
    _print_result(result, args.json)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.sizes:
        rows = table_sizes(args.n_server, seed=args.seed)
        print(sizes_table_text(rows))
        for line in sizes_machine_lines(rows):
            print(line)
        return EXIT_OK
    cfg = BenchConfig(
        n_server=args.n_server,
        n_client=args.n_client,
        total_fp=args.fpr,
        ds_type=args.ds,
        reveal=args.reveal,
        repeats=args.repeats,
        overlap=args.overlap,
        seed=args.seed,
        extrapolate_from=args.extrapolate_from,
    )
    report = run_bench(cfg)
    print(report.table())
    for line in report.machine_lines():
        print(line)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="ecpsi", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("setup", help="offline phase: build key + setup message")
    p.add_argument("--server-set", required=True, help="newline-delimited element file")
    p.add_argument("--max-queries", type=int, default=1000,
                   help="client lookups the FP budget covers (default 1000)")
    p.add_argument("--fpr", type=float, default=1e-9,
                   help="total false-positive budget over --max-queries lookups")
    p.add_argument("--ds", choices=("bloom", "gcs"), default="bloom")
    p.add_argument("--out", required=True, help="setup message output file (public)")
    p.add_argument("--key-out", required=True, help="key file output (private, 0600)")
    p.add_argument("--key-in", help="reuse the key from an existing key file")
    p.add_argument("--pin-reveal", choices=("true", "false"),
                   help="reject requests whose reveal flag differs")
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("serve", help="run the TCP demo service")
    p.add_argument("--key", required=True, help="key file from setup")
    p.add_argument("--listen", default="127.0.0.1:0", help="HOST:PORT (port 0 = ephemeral)")
    p.add_argument("--max-requests", type=int, default=None,
                   help="refuse further requests after this many (rate limit)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("query", help="full client flow against a running server")
    p.add_argument("--client-set", required=True)
    p.add_argument("--setup", required=True, help="setup message file from the server")
    p.add_argument("--connect", required=True, help="HOST:PORT of the service")
    p.add_argument("--reveal", action="store_true",
                   help="learn which elements intersect, not just how many")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("request", help="client step 1: blind the element file")
    p.add_argument("--client-set", required=True)
    p.add_argument("--reveal", action="store_true")
    p.add_argument("--out", required=True, help="request message output file")
    p.add_argument("--state-out", required=True, help="client state output (private, 0600)")
    p.add_argument("--blind-in", help="hex scalar to use as the blind (tests only)")
    p.set_defaults(func=cmd_request)

    p = sub.add_parser("respond", help="server online step: answer a request file")
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", required=True, help="request message file")
    p.add_argument("--out", required=True, help="response message output file")
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser("finish", help="client final step: compute the result")
    p.add_argument("--state", required=True, help="client state file from 'request'")
    p.add_argument("--setup", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_finish)

    p = sub.add_parser("bench", help="timing/size benchmark harness")
    p.add_argument("--n-server", type=int, default=10_000)
    p.add_argument("--n-client", type=int, default=1_000)
    p.add_argument("--fpr", type=float, default=1e-9)
    p.add_argument("--ds", choices=("bloom", "gcs"), default="bloom")
    p.add_argument("--reveal", action="store_true")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--overlap", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--extrapolate-from", type=int, default=None,
                   help="time the setup at this smaller N and scale, marked with *")
    p.add_argument("--sizes", action="store_true",
                   help="print the structure-size sweep over FP rates instead")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _Usage as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameters as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except PsiError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_PROTOCOL
    except (OSError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
