/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_decaycurve_free: (a: number, b: number) => void;
export const __wbg_runresult_free: (a: number, b: number) => void;
export const conic_points: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const decay_curve: (a: number) => [number, number, number];
export const decaycurve_ln_err: (a: number) => [number, number];
export const decaycurve_slope: (a: number) => number;
export const decaycurve_theta: (a: number) => [number, number];
export const runresult_anchors: (a: number) => [number, number];
export const runresult_conics: (a: number) => [number, number];
export const runresult_is_empty: (a: number) => number;
export const runresult_len: (a: number) => number;
export const runresult_metrics_json: (a: number) => [number, number];
export const runresult_r: (a: number) => [number, number];
export const runresult_rel_r: (a: number) => [number, number];
export const runresult_s_over_phi: (a: number) => [number, number];
export const runresult_t: (a: number) => [number, number];
export const runresult_target: (a: number) => [number, number];
export const runresult_u_rtn: (a: number) => [number, number];
export const scenario_names: () => [number, number];
export const simulate: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
