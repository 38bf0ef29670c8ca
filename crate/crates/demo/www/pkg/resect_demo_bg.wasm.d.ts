/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_mapview_edge_mean: (a: number) => number;
export const __wbg_get_mapview_iou: (a: number) => number;
export const __wbg_get_mapview_overcut: (a: number) => number;
export const __wbg_get_mapview_undercut: (a: number) => number;
export const __wbg_mapview_free: (a: number, b: number) => void;
export const __wbg_set_mapview_edge_mean: (a: number, b: number) => void;
export const __wbg_set_mapview_iou: (a: number, b: number) => void;
export const __wbg_set_mapview_overcut: (a: number, b: number) => void;
export const __wbg_set_mapview_undercut: (a: number, b: number) => void;
export const __wbg_spectrumview_free: (a: number, b: number) => void;
export const aimPoint: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const aimRaster: (a: number, b: number, c: number) => [number, number, number, number];
export const mapDisc: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const mapview_tags: (a: number) => [number, number];
export const mapview_vertices: (a: number) => [number, number];
export const spectrum: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const spectrumview_raw: (a: number) => [number, number];
export const spectrumview_smoothed: (a: number) => [number, number];
export const spectrumview_wavelengths: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
