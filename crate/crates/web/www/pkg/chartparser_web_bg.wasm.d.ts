/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demochart_free: (a: number, b: number) => void;
export const demochart_binary_rgba: (a: number, b: number) => [number, number];
export const demochart_generate: (a: number, b: number, c: number, d: number) => number;
export const demochart_height: (a: number) => number;
export const demochart_parse: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const demochart_rgba: (a: number) => [number, number];
export const demochart_truth_json: (a: number) => [number, number];
export const demochart_variant: (a: number) => [number, number];
export const demochart_width: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
