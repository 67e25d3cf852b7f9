/* tslint:disable */
/* eslint-disable */

/**
 * Mean-variance against Laplace weights for unit-volatility assets.
 * `alphas` is a comma or whitespace separated list.
 */
export function allocation_demo(alphas: string, rho: number, lambda: number): string;

/**
 * Isotropic `N*(N)` curve plus a simulated scatter from a seeded panel.
 */
export function nstar_demo(n_max: number, rho: number, periods: number, trials: number, seed: number): string;

/**
 * Residual/systematic risk split and the centering factor against `N`.
 */
export function risk_demo(rho: number, n_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly allocation_demo: (a: number, b: number, c: number, d: number) => [number, number];
    readonly nstar_demo: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly risk_demo: (a: number, b: number) => [number, number];
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
