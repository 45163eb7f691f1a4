/* tslint:disable */
/* eslint-disable */

/**
 * Exact and thermodynamic couplings `h_1 ..= h_{N/2}` at field `g`,
 * concatenated: first the exact block, then the thermodynamic one.
 */
export function couplingProfile(n: number, g: number): Float64Array;

/**
 * Instantaneous ground-state probability along a ramp, as `[g0, p0, g1, p1, ...]`.
 * `coupling` is `exact`, `thermo`, `none` or `truncated:M`.
 */
export function instantTrace(n: number, t_final: number, g0: number, gf: number, coupling: string, samples: number): Float64Array;

/**
 * Final ground-state probability for every truncation range `M = 0 ..= N/2`.
 */
export function truncationCurve(n: number, t_final: number, g0: number, gf: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly couplingProfile: (a: number, b: number) => [number, number, number, number];
    readonly instantTrace: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly truncationCurve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
