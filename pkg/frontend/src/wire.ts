/**
 * Structural encode/decode of the core's wire messages, straight from
 * docs/wire-format.md. "Structural" means framing, lengths, counts and
 * compressed-set headers are fully validated; curve membership of the
 * 33-byte points is not re-checked here (that is the core's job - this
 * layer never does group math).
 */

export const MAGIC = new Uint8Array([0x50, 0x53, 0x49, 0x31]); // "PSI1"
export const VERSION = 1;
export const POINT_BYTES = 33;
export const MAX_ELEMENTS = 1 << 24;

export class MalformedMessageError extends Error {}

export interface BloomPayload {
  kind: 'bloom';
  numHashes: number;
  numBits: number;
  bits: Uint8Array;
}

export interface GcsPayload {
  kind: 'gcs';
  riceParam: number;
  numElements: number;
  hashRange: bigint;
  bitLength: number;
  bitstream: Uint8Array;
}

export interface SetupMessage {
  type: 'setup';
  structure: BloomPayload | GcsPayload;
}

export interface RequestMessage {
  type: 'request';
  reveal: boolean;
  elements: Uint8Array[];
}

export interface ResponseMessage {
  type: 'response';
  elements: Uint8Array[];
}

export type Message = SetupMessage | RequestMessage | ResponseMessage;

function fail(text: string): never {
  throw new MalformedMessageError(text);
}

function view(buf: Uint8Array): DataView {
  return new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
}

function safeNumber(v: bigint, what: string): number {
  if (v > BigInt(Number.MAX_SAFE_INTEGER)) fail(`${what} does not fit a JS number`);
  return Number(v);
}

function readPoints(buf: Uint8Array, offset: number, count: number): Uint8Array[] {
  const out: Uint8Array[] = [];
  for (let i = 0; i < count; i++) {
    const raw = buf.subarray(offset + i * POINT_BYTES, offset + (i + 1) * POINT_BYTES);
    if (raw[0] !== 2 && raw[0] !== 3) fail(`element ${i} has prefix 0x${raw[0].toString(16)}`);
    out.push(new Uint8Array(raw));
  }
  return out;
}

function parseBloom(body: Uint8Array): BloomPayload {
  if (body.length < 13) fail('bloom payload shorter than its 13-byte header');
  const dv = view(body);
  const numHashes = dv.getUint32(1, true);
  const numBits = safeNumber(dv.getBigUint64(5, true), 'bloom num_bits');
  if (numHashes < 1 || numHashes > 64) fail(`bloom num_hashes ${numHashes} out of [1, 64]`);
  if (numBits < 1) fail('bloom num_bits must be >= 1');
  const expected = Math.ceil(numBits / 8);
  if (body.length - 13 !== expected) fail('bloom bit array length mismatch');
  const bits = new Uint8Array(body.subarray(13));
  const pad = 8 * expected - numBits;
  if (pad > 0 && bits[bits.length - 1] >> (8 - pad) !== 0) fail('bloom padding bits set');
  return { kind: 'bloom', numHashes, numBits, bits };
}

function parseGcs(body: Uint8Array): GcsPayload {
  if (body.length < 26) fail('gcs payload shorter than its 26-byte header');
  const dv = view(body);
  const riceParam = body[1];
  const numElementsBig = dv.getBigUint64(2, true);
  const hashRange = dv.getBigUint64(10, true);
  const bitLength = safeNumber(dv.getBigUint64(18, true), 'gcs bit length');
  if (riceParam > 56) fail(`gcs rice_param ${riceParam} out of [0, 56]`);
  if (hashRange !== numElementsBig << BigInt(riceParam)) fail('gcs hash_range inconsistent');
  const numElements = safeNumber(numElementsBig, 'gcs num_elements');
  if (bitLength < numElements * (riceParam + 1) || bitLength > numElements * (riceParam + 2)) {
    fail('gcs bit length inconsistent with element count');
  }
  const expected = Math.ceil(bitLength / 8);
  if (body.length - 26 !== expected) fail('gcs bitstream length mismatch');
  const bitstream = new Uint8Array(body.subarray(26));
  const pad = 8 * expected - bitLength;
  if (pad > 0 && (bitstream[bitstream.length - 1] & ((1 << pad) - 1)) !== 0) {
    fail('gcs padding bits set');
  }
  return { kind: 'gcs', riceParam, numElements, hashRange, bitLength, bitstream };
}

export function parseMessage(buf: Uint8Array): Message {
  if (buf.length < 6) fail(`buffer of ${buf.length} bytes is shorter than the frame header`);
  for (let i = 0; i < 4; i++) if (buf[i] !== MAGIC[i]) fail('bad magic');
  if (buf[4] !== VERSION) fail(`unsupported version ${buf[4]}`);
  const msgType = buf[5];
  const body = buf.subarray(6);

  if (msgType === 1) {
    if (body.length === 0) fail('setup message carries no payload');
    if (body[0] === 0) return { type: 'setup', structure: parseBloom(body) };
    if (body[0] === 1) return { type: 'setup', structure: parseGcs(body) };
    fail(`unknown ds_type ${body[0]}`);
  }
  if (msgType === 2) {
    if (body.length < 5) fail('request truncated inside its header');
    const reveal = body[0];
    if (reveal !== 0 && reveal !== 1) fail(`reveal flag must be 0 or 1, got ${reveal}`);
    const count = view(body).getUint32(1, true);
    if (count > MAX_ELEMENTS) fail(`request count ${count} exceeds the cap`);
    if (body.length !== 5 + count * POINT_BYTES) fail('request length mismatch');
    return { type: 'request', reveal: reveal === 1, elements: readPoints(body, 5, count) };
  }
  if (msgType === 3) {
    if (body.length < 4) fail('response truncated inside its header');
    const count = view(body).getUint32(0, true);
    if (count > MAX_ELEMENTS) fail(`response count ${count} exceeds the cap`);
    if (body.length !== 4 + count * POINT_BYTES) fail('response length mismatch');
    return { type: 'response', elements: readPoints(body, 4, count) };
  }
  fail(`unknown msg_type ${msgType}`);
}

function frameHeader(msgType: number, bodyLength: number): [Uint8Array, DataView] {
  const out = new Uint8Array(6 + bodyLength);
  out.set(MAGIC, 0);
  out[4] = VERSION;
  out[5] = msgType;
  return [out, new DataView(out.buffer)];
}

export function encodeMessage(msg: Message): Uint8Array {
  if (msg.type === 'setup') {
    const s = msg.structure;
    if (s.kind === 'bloom') {
      const [out, dv] = frameHeader(1, 13 + s.bits.length);
      out[6] = 0;
      dv.setUint32(7, s.numHashes, true);
      dv.setBigUint64(11, BigInt(s.numBits), true);
      out.set(s.bits, 19);
      return out;
    }
    const [out, dv] = frameHeader(1, 26 + s.bitstream.length);
    out[6] = 1;
    out[7] = s.riceParam;
    dv.setBigUint64(8, BigInt(s.numElements), true);
    dv.setBigUint64(16, s.hashRange, true);
    dv.setBigUint64(24, BigInt(s.bitLength), true);
    out.set(s.bitstream, 32);
    return out;
  }
  if (msg.type === 'request') {
    const [out, dv] = frameHeader(2, 5 + POINT_BYTES * msg.elements.length);
    out[6] = msg.reveal ? 1 : 0;
    dv.setUint32(7, msg.elements.length, true);
    msg.elements.forEach((e, i) => {
      if (e.length !== POINT_BYTES) fail(`element ${i} is ${e.length} bytes, not 33`);
      out.set(e, 11 + i * POINT_BYTES);
    });
    return out;
  }
  const [out, dv] = frameHeader(3, 4 + POINT_BYTES * msg.elements.length);
  dv.setUint32(6, msg.elements.length, true);
  msg.elements.forEach((e, i) => {
    if (e.length !== POINT_BYTES) fail(`element ${i} is ${e.length} bytes, not 33`);
    out.set(e, 10 + i * POINT_BYTES);
  });
  return out;
}
