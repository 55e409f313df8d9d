/* tslint:disable */
/* eslint-disable */

/**
 * ln|e~_R| against swept angle once the surfaces have settled.
 */
export class DecayCurve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly ln_err: Float64Array;
    /**
     * least-squares slope, expected near -lambda_r
     */
    readonly slope: number;
    readonly theta: Float64Array;
}

/**
 * Logged series of one closed-loop run, flattened for typed arrays.
 */
export class RunResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    is_empty(): boolean;
    len(): number;
    /**
     * centre of each target conic, xyz per target
     */
    readonly anchors: Float64Array;
    /**
     * Every target conic, `CONIC_POINTS` xyz points each, about its own anchor.
     */
    readonly conics: Float64Array;
    readonly metrics_json: string;
    /**
     * inertial position, xyz per sample
     */
    readonly r: Float64Array;
    /**
     * position relative to the active reference, xyz per sample
     */
    readonly rel_r: Float64Array;
    /**
     * |s_j| / phi_j, three values per sample
     */
    readonly s_over_phi: Float64Array;
    readonly t: Float64Array;
    /**
     * active target index per sample
     */
    readonly target: Uint32Array;
    /**
     * RTN command, three values per sample
     */
    readonly u_rtn: Float64Array;
}

/**
 * Samples the conic with invariants `h_d`, `e_d` and `mu` as xyz triples.
 */
export function conic_points(h_d: Float64Array, e_d: Float64Array, mu: number, n: number): Float64Array;

/**
 * Disturbance-free run about a point mass with eccentricity slope `lambda_r`.
 */
export function decay_curve(lambda_r: number): DecayCurve;

/**
 * Names accepted by [`simulate`], comma-separated.
 */
export function scenario_names(): string;

/**
 * Runs a built-in scenario.
 *
 * `layer_scale` multiplies the scenario's boundary-layer coefficient;
 * `sign_switching` replaces the saturation by the discontinuous sign.
 * The log is decimated to at most `max_points` samples.
 */
export function simulate(name: string, lambda_r: number, layer_scale: number, sign_switching: boolean, duration: number, max_points: number): RunResult;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_decaycurve_free: (a: number, b: number) => void;
    readonly __wbg_runresult_free: (a: number, b: number) => void;
    readonly conic_points: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly decay_curve: (a: number) => [number, number, number];
    readonly decaycurve_ln_err: (a: number) => [number, number];
    readonly decaycurve_slope: (a: number) => number;
    readonly decaycurve_theta: (a: number) => [number, number];
    readonly runresult_anchors: (a: number) => [number, number];
    readonly runresult_conics: (a: number) => [number, number];
    readonly runresult_is_empty: (a: number) => number;
    readonly runresult_len: (a: number) => number;
    readonly runresult_metrics_json: (a: number) => [number, number];
    readonly runresult_r: (a: number) => [number, number];
    readonly runresult_rel_r: (a: number) => [number, number];
    readonly runresult_s_over_phi: (a: number) => [number, number];
    readonly runresult_t: (a: number) => [number, number];
    readonly runresult_target: (a: number) => [number, number];
    readonly runresult_u_rtn: (a: number) => [number, number];
    readonly scenario_names: () => [number, number];
    readonly simulate: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
