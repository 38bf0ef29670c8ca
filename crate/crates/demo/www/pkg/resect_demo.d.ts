/* tslint:disable */
/* eslint-disable */

/**
 * Scan of a disc-shaped tumor and the boundary mapped from it.
 */
export class MapView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    edge_mean: number;
    iou: number;
    overcut: number;
    undercut: number;
    /**
     * `[x, y, is_tumor]` per scan point.
     */
    readonly tags: Float64Array;
    /**
     * Boundary outline as `[x0, y0, x1, y1, ...]`.
     */
    readonly vertices: Float64Array;
}

/**
 * A synthetic probe spectrum before and after preprocessing.
 */
export class SpectrumView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Cropped to the band and max-normalized, not smoothed.
     */
    readonly raw: Float64Array;
    readonly smoothed: Float64Array;
    readonly wavelengths: Float64Array;
}

export function aimPoint(tilt_deg: number, x: number, y: number, z: number): Float64Array;

export function aimRaster(tilt_deg: number, z: number, per_side: number): Float64Array;

export function mapDisc(cx: number, cy: number, radius: number, per_side: number, shrink: number): MapView;

export function spectrum(tumor: boolean, seed: number, noise: number, window: number, order: number): SpectrumView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_mapview_edge_mean: (a: number) => number;
    readonly __wbg_get_mapview_iou: (a: number) => number;
    readonly __wbg_get_mapview_overcut: (a: number) => number;
    readonly __wbg_get_mapview_undercut: (a: number) => number;
    readonly __wbg_mapview_free: (a: number, b: number) => void;
    readonly __wbg_set_mapview_edge_mean: (a: number, b: number) => void;
    readonly __wbg_set_mapview_iou: (a: number, b: number) => void;
    readonly __wbg_set_mapview_overcut: (a: number, b: number) => void;
    readonly __wbg_set_mapview_undercut: (a: number, b: number) => void;
    readonly __wbg_spectrumview_free: (a: number, b: number) => void;
    readonly aimPoint: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly aimRaster: (a: number, b: number, c: number) => [number, number, number, number];
    readonly mapDisc: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly mapview_tags: (a: number) => [number, number];
    readonly mapview_vertices: (a: number) => [number, number];
    readonly spectrum: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly spectrumview_raw: (a: number) => [number, number];
    readonly spectrumview_smoothed: (a: number) => [number, number];
    readonly spectrumview_wavelengths: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
