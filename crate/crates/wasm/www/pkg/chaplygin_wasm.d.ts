/* tslint:disable */
/* eslint-disable */

/**
 * Invariant density and reducing multiplier of the special reduced system on S²; JSON result.
 */
export function density_map(a: Float64Array, eps: number, rows: number, cols: number): string;

/**
 * Divergence of `ρf` at random phase points; JSON result.
 */
export function measure_check(system: string, n: number, eps: number, samples: number, seed: bigint): string;

/**
 * Reduced rolling over S² for a 3D ball with principal moments; JSON result.
 */
export function roll_3d(eps: number, d: number, moments: Float64Array, k: Float64Array, gamma: Float64Array, t_end: number, h: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly density_map: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly measure_check: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number, number];
    readonly roll_3d: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
