/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Crossing counts per class, as JSON.
     */
    classify(): string;
    /**
     * SVG of the drawing at `t` ms.
     */
    frame(t: number): string;
    /**
     * K_`nodes` on a circle with minimum stub ratio `delta`.
     */
    constructor(nodes: number, delta: number);
    scheduleJson(): string;
    /**
     * Recomputes the schedule; returns a JSON summary.
     */
    schedule(overlap: boolean, duplicate: boolean, allow: number, order: string): string;
    /**
     * Length of one animation loop in ms.
     */
    readonly period: number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_classify: (a: number) => [number, number, number, number];
    readonly demo_frame: (a: number, b: number) => [number, number];
    readonly demo_new: (a: number, b: number) => [number, number, number];
    readonly demo_period: (a: number) => number;
    readonly demo_schedule: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly demo_scheduleJson: (a: number) => [number, number];
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
