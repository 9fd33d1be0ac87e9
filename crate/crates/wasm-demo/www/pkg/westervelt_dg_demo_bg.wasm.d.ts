/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const pressure_convergence: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const simulation_concentration_image: (a: number, b: number) => [number, number];
export const simulation_delta: (a: number) => [number, number];
export const simulation_max_kappa_p: (a: number) => number;
export const simulation_new: (a: number, b: number, c: number) => [number, number, number];
export const simulation_pressure_image: (a: number, b: number) => [number, number];
export const simulation_step: (a: number, b: number) => [number, number, number];
export const simulation_time: (a: number) => number;
export const simulation_times: (a: number) => [number, number];
export const upwind_identity: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
