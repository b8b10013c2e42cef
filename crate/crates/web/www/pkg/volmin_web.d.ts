/* tslint:disable */
/* eslint-disable */

/**
 * `W` sampled on a `resolution^2` grid over the Reeb slice in chart
 * coordinates, the boundary of the slice, and the Newton path.
 */
export function landscape(cone: string, decomposition: string, resolution: number): string;

/**
 * Names and spec texts of the built-in examples.
 */
export function presets(): string;

/**
 * Slice polygon at chart point `(t0, t1)` with its barycenter and the
 * Futaki vector.
 */
export function slice_view(cone: string, t0: number, t1: number): string;

/**
 * Twists the decomposition to the rational point nearest `(t0, t1)` and
 * compares the Minkowski sum of the twisted pieces with the true slice.
 */
export function twist_view(cone: string, decomposition: string, t0: number, t1: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly landscape: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly presets: () => [number, number];
    readonly slice_view: (a: number, b: number, c: number, d: number) => [number, number];
    readonly twist_view: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
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
