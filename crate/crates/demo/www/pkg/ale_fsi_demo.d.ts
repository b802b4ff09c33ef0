/* tslint:disable */
/* eslint-disable */

/**
 * A meshed unit box with a disk in the middle, plus the last flow solved on
 * it.
 */
export class Scene {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Solves steady Stokes flow for a disk moving with `(vx, vy, omega)`.
     * Returns `[Fx, Fy, M]` from the boundary integral followed by the
     * same from the bulk integral.
     */
    drag(vx: number, vy: number, omega: number, viscosity: number): Float64Array;
    minAngle(): number;
    constructor(h: number, radius: number);
    nodeCount(): number;
    /**
     * Vertex speeds of the last `drag` solve.
     */
    speed(): Float64Array;
    triangles(): Uint32Array;
    vertices(): Float64Array;
}

/**
 * Runs `iterations` global iterations of a disk falling in the unit box.
 * Returns rows of `[q_y(T), v_y(T), omega(T), d_k]`, flattened. A run that
 * stops early returns the rows it completed.
 */
export function fall(h: number, body_density: number, final_time: number, tau: number, iterations: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_scene_free: (a: number, b: number) => void;
    readonly fall: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly scene_drag: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly scene_minAngle: (a: number) => number;
    readonly scene_new: (a: number, b: number) => [number, number, number];
    readonly scene_nodeCount: (a: number) => number;
    readonly scene_speed: (a: number) => [number, number];
    readonly scene_triangles: (a: number) => [number, number];
    readonly scene_vertices: (a: number) => [number, number];
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
