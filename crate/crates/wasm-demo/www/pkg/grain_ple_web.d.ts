/* tslint:disable */
/* eslint-disable */

/**
 * One frame through encrypt, channel and decrypt, as `0`/`1` strings.
 */
export class Transmission {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    ciphertext: string;
    decrypted: string;
    errors: string;
    keystream: string;
    /**
     * Positions where `decrypted` differs from `plaintext` XOR `errors`.
     */
    mismatches: number;
    plaintext: string;
    received: string;
}

export function ber_curve(codec: string, p_values: Float64Array, trials: number, data_bits: number, disclosed_prefix: number, seed: number): Float64Array;

export function keystream_hex(key: string, nonce: string, bits: number, backend: string): string;

export function transmit(key: string, nonce: string, bits: number, disclosed_prefix: number, p: number, seed: bigint): Transmission;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_transmission_ciphertext: (a: number) => [number, number];
    readonly __wbg_get_transmission_decrypted: (a: number) => [number, number];
    readonly __wbg_get_transmission_errors: (a: number) => [number, number];
    readonly __wbg_get_transmission_keystream: (a: number) => [number, number];
    readonly __wbg_get_transmission_mismatches: (a: number) => number;
    readonly __wbg_get_transmission_plaintext: (a: number) => [number, number];
    readonly __wbg_get_transmission_received: (a: number) => [number, number];
    readonly __wbg_set_transmission_ciphertext: (a: number, b: number, c: number) => void;
    readonly __wbg_set_transmission_decrypted: (a: number, b: number, c: number) => void;
    readonly __wbg_set_transmission_errors: (a: number, b: number, c: number) => void;
    readonly __wbg_set_transmission_keystream: (a: number, b: number, c: number) => void;
    readonly __wbg_set_transmission_mismatches: (a: number, b: number) => void;
    readonly __wbg_set_transmission_plaintext: (a: number, b: number, c: number) => void;
    readonly __wbg_set_transmission_received: (a: number, b: number, c: number) => void;
    readonly __wbg_transmission_free: (a: number, b: number) => void;
    readonly ber_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly keystream_hex: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly transmit: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: bigint) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
