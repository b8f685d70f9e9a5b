/* tslint:disable */
/* eslint-disable */

export class DemoChart {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Ink mask at `threshold` as black-on-white RGBA.
     */
    binary_rgba(threshold: number): Uint8Array;
    /**
     * Chart `index` of the corpus seeded with `seed`; the variant cycles
     * with the index. `jitter` adds per-channel noise (0 keeps it crisp).
     */
    static generate(seed: number, index: number, jitter: number, antialias: boolean): DemoChart;
    height(): number;
    /**
     * Runs the pipeline with the chart's own text boxes standing in for OCR.
     * Returns JSON with the table, its HTML rendering, detected geometry,
     * warnings and the error if a stage failed.
     */
    parse(binarize_threshold: number, axis_band: number, merge_gap: number, color_tolerance: number): string;
    /**
     * Pixels as RGBA bytes, ready for `ImageData`.
     */
    rgba(): Uint8Array;
    truth_json(): string;
    variant(): string;
    width(): number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demochart_free: (a: number, b: number) => void;
    readonly demochart_binary_rgba: (a: number, b: number) => [number, number];
    readonly demochart_generate: (a: number, b: number, c: number, d: number) => number;
    readonly demochart_height: (a: number) => number;
    readonly demochart_parse: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly demochart_rgba: (a: number) => [number, number];
    readonly demochart_truth_json: (a: number) => [number, number];
    readonly demochart_variant: (a: number) => [number, number];
    readonly demochart_width: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
