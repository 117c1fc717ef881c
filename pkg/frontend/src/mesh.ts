/** Mesh utilities that stay independent of the renderer (unit-testable). */
import { Mesh } from "./schemas";

/** Connected components over shared-vertex adjacency (union-find). */
export function meshComponents(mesh: Mesh): number {
  if (mesh.triangles.length === 0) return 0;
  const used = new Set<number>();
  for (const t of mesh.triangles) for (const v of t) used.add(v);
  const parent = new Map<number, number>();
  const find = (x: number): number => {
    let r = x;
    while (parent.get(r) !== r) r = parent.get(r)!;
    let c = x;
    while (parent.get(c) !== c) {
      const next = parent.get(c)!;
      parent.set(c, r);
      c = next;
    }
    return r;
  };
  for (const v of used) parent.set(v, v);
  for (const [a, b, c] of mesh.triangles) {
    parent.set(find(a), find(b));
    parent.set(find(find(a)), find(c));
  }
  const roots = new Set<number>();
  for (const v of used) roots.add(find(v));
  return roots.size;
}

/** Axis-aligned bounding box of the vertices, or null for an empty mesh. */
export function meshBounds(mesh: Mesh): { lo: number[]; hi: number[] } | null {
  if (mesh.vertices.length === 0) return null;
  const lo = [...mesh.vertices[0]];
  const hi = [...mesh.vertices[0]];
  for (const v of mesh.vertices) {
    for (let d = 0; d < 3; d++) {
      lo[d] = Math.min(lo[d], v[d]);
      hi[d] = Math.max(hi[d], v[d]);
    }
  }
  return { lo, hi };
}
