/* tslint:disable */
/* eslint-disable */

/**
 * Cohomology dimensions and representatives through `max_degree`.
 */
export function cohomology(text: string, max_degree: number): string;

export function fixture(name: string): string;

/**
 * Names of the bundled models.
 */
export function fixture_names(): string;

/**
 * TC_r bounds with provenance; `keep` is a comma-separated list (may be empty).
 */
export function tc_bounds(text: string, r: number, keep: string, max_degree: number): string;

/**
 * Series `Σ TC_{r+1} z^r` for `r = 1..=rmax` and its fit.
 */
export function tc_series(text: string, rmax: number, max_degree: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly cohomology: (a: number, b: number, c: number) => [number, number];
    readonly fixture: (a: number, b: number) => [number, number];
    readonly fixture_names: () => [number, number];
    readonly tc_bounds: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly tc_series: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
