/* tslint:disable */
/* eslint-disable */

/**
 * An optimization run advanced one iteration at a time.
 */
export class Session {
    free(): void;
    [Symbol.dispose](): void;
    initial_volume(): number;
    iterations(): number;
    constructor(fixture: string, stress_constrained: boolean, fx: number, fy: number);
    /**
     * Runs one iteration and returns the new frame with its history record.
     */
    step(): string;
}

/**
 * Binary STL of the lug fixture with `n` cells across its width.
 */
export function lug_stl(n: number): Uint8Array;

/**
 * Static analysis of a planar fixture pinned on `pin` with a resultant
 * force (N) on `load`. Returns the frame as JSON.
 */
export function solve(fixture: string, fx: number, fy: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_session_free: (a: number, b: number) => void;
    readonly lug_stl: (a: number) => [number, number, number, number];
    readonly session_initial_volume: (a: number) => number;
    readonly session_iterations: (a: number) => number;
    readonly session_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly session_step: (a: number) => [number, number, number, number];
    readonly solve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
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
