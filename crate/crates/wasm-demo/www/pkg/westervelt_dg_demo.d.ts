/* tslint:disable */
/* eslint-disable */

/**
 * Realistic setup on a coarser mesh, with the coupled and the `D = D0` reference transport.
 */
export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * RGBA image of the coupled concentration, dark to bright from zero to its maximum.
     */
    concentration_image(size: number): Uint8Array;
    /**
     * Relative change at the top, normalized by the running reference outflow maximum.
     */
    delta(): Float64Array;
    max_kappa_p(): number;
    /**
     * `cells` per direction; `amplitude_scale` multiplies the source; `d1` sets the pressure sensitivity.
     */
    constructor(cells: number, amplitude_scale: number, d1: number);
    /**
     * RGBA image of the pressure, blue to red, symmetric about zero.
     */
    pressure_image(size: number): Uint8Array;
    /**
     * Advances `n` coupled steps; returns the current relative change at the top.
     */
    step(n: number): number;
    time(): number;
    times(): Float64Array;
}

/**
 * Manufactured pressure problem up to `t_end`; one CSV row per level: `level,h,steps,p_dg,rate,pdot_l2,rate`.
 */
export function pressure_convergence(degree: number, levels: Uint32Array, t_end: number): string;

/**
 * `[phi^T B phi, sum of identity terms, |difference|]` for a pseudo-random field on the unit square.
 */
export function upwind_identity(cells: number, degree: number, vx: number, vy: number, seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly pressure_convergence: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly simulation_concentration_image: (a: number, b: number) => [number, number];
    readonly simulation_delta: (a: number) => [number, number];
    readonly simulation_max_kappa_p: (a: number) => number;
    readonly simulation_new: (a: number, b: number, c: number) => [number, number, number];
    readonly simulation_pressure_image: (a: number, b: number) => [number, number];
    readonly simulation_step: (a: number, b: number) => [number, number, number];
    readonly simulation_time: (a: number) => number;
    readonly simulation_times: (a: number) => [number, number];
    readonly upwind_identity: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
