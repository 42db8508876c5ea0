/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_transmission_ciphertext: (a: number) => [number, number];
export const __wbg_get_transmission_decrypted: (a: number) => [number, number];
export const __wbg_get_transmission_errors: (a: number) => [number, number];
export const __wbg_get_transmission_keystream: (a: number) => [number, number];
export const __wbg_get_transmission_mismatches: (a: number) => number;
export const __wbg_get_transmission_plaintext: (a: number) => [number, number];
export const __wbg_get_transmission_received: (a: number) => [number, number];
export const __wbg_set_transmission_ciphertext: (a: number, b: number, c: number) => void;
export const __wbg_set_transmission_decrypted: (a: number, b: number, c: number) => void;
export const __wbg_set_transmission_errors: (a: number, b: number, c: number) => void;
export const __wbg_set_transmission_keystream: (a: number, b: number, c: number) => void;
export const __wbg_set_transmission_mismatches: (a: number, b: number) => void;
export const __wbg_set_transmission_plaintext: (a: number, b: number, c: number) => void;
export const __wbg_set_transmission_received: (a: number, b: number, c: number) => void;
export const __wbg_transmission_free: (a: number, b: number) => void;
export const ber_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const keystream_hex: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const transmit: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: bigint) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
