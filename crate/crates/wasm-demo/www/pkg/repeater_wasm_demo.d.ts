/* tslint:disable */
/* eslint-disable */

export function code_names(): string[];

export function lstar_curve(code: string, q_min: number, q_max: number, points: number, f_star: number): Float64Array;

export function pfail_curve(n: number, f0: number, beta: number, delta: number, levels: number, ratio_max: number): Float64Array;

export function required_raw_pairs(n: number, f0: number, beta: number, delta: number, levels: number, target: number): number;

export function table1_csv(q: number, f_star: number, l0_km: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly code_names: () => [number, number];
    readonly lstar_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly pfail_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly required_raw_pairs: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly table1_csv: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
