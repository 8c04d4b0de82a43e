/* tslint:disable */
/* eslint-disable */

/**
 * Orthonormal cusp-form basis for one of the bundled prime levels.
 */
export class Level {
    free(): void;
    [Symbol.dispose](): void;
    genus(): number;
    /**
     * Bergman density `y^2 sum |f_k|^2` on an `nx * ny` grid over
     * `[x0, x1] x [y0, y1]`, row-major with the top row first.
     */
    heatmap(x0: number, x1: number, y0: number, y1: number, nx: number, ny: number): Float64Array;
    level(): number;
    constructor(level: number);
}

/**
 * `[[r, B(r)], ...]` for `n` radii evenly spaced in `[r_min, r_max]`.
 */
export function bound_curve(r_min: number, r_max: number, n: number): string;

/**
 * Orbit of `z = x + iy` under a built-in group (`bolza`, `gamma0-N`) within hyperbolic distance `radius`, as JSON
 * `{complete, points: [{x, y, rho, word}]}`.
 */
export function orbit_ball(group: string, x: number, y: number, radius: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_level_free: (a: number, b: number) => void;
    readonly bound_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly level_genus: (a: number) => number;
    readonly level_heatmap: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly level_level: (a: number) => number;
    readonly level_new: (a: number) => [number, number, number];
    readonly orbit_ball: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
