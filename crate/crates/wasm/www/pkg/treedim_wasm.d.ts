/* tslint:disable */
/* eslint-disable */

/**
 * Closed-form Hausdorff dimension of the BSV group on the `m`-adic tree.
 */
export function closed_form(m: number): string;

/**
 * Closed forms for every `m` in `2..=m_max`, for plotting against `m`.
 */
export function closed_form_curve(m_max: number): string;

/**
 * Level-by-level report: indices, `s_n`, partial dimensions and tails.
 */
export function dimension_series(m: number, max_level: number): string;

/**
 * Permutation induced on level `n` by a word in `a`, `b` and their inverses.
 */
export function level_action(m: number, word: string, n: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly closed_form: (a: number) => [number, number];
    readonly closed_form_curve: (a: number) => [number, number];
    readonly dimension_series: (a: number, b: number) => [number, number];
    readonly level_action: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
