export { CoreError, runCore } from './core.js';
export {
  ClientHandle,
  HandleDestroyedError,
  ServerHandle,
} from './handles.js';
export type { IntersectionResult, SetupOptions } from './handles.js';
export {
  MAX_ELEMENTS,
  MalformedMessageError,
  POINT_BYTES,
  encodeMessage,
  parseMessage,
} from './wire.js';
export type {
  BloomPayload,
  GcsPayload,
  Message,
  RequestMessage,
  ResponseMessage,
  SetupMessage,
} from './wire.js';
