/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_scene_free: (a: number, b: number) => void;
export const fall: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const scene_drag: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const scene_minAngle: (a: number) => number;
export const scene_new: (a: number, b: number) => [number, number, number];
export const scene_nodeCount: (a: number) => number;
export const scene_speed: (a: number) => [number, number];
export const scene_triangles: (a: number) => [number, number];
export const scene_vertices: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
