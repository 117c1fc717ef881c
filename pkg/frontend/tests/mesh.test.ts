import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { meshBounds, meshComponents } from "../src/mesh";
import { MeshBundleSchema } from "../src/schemas";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

function bundle(name: string) {
  return MeshBundleSchema.parse(JSON.parse(readFileSync(join(FIXTURES, `${name}.json`), "utf-8")));
}

describe("mesh utilities", () => {
  it("counts components: simple shapes", () => {
    const tri = {
      level: 0.1,
      vertices: [
        [0, 0, 0], [1, 0, 0], [0, 1, 0],
        [5, 5, 5], [6, 5, 5], [5, 6, 5],
      ],
      normals: new Array(6).fill([0, 0, 1]),
      triangles: [
        [0, 1, 2],
        [3, 4, 5],
      ],
    };
    expect(meshComponents(tri)).toBe(2);
    expect(meshComponents({ ...tri, triangles: [] })).toBe(0);
  });

  it("the sinusoidal scenario's high level splits into two bodies", () => {
    const b = bundle("mesh_s5");
    const high = b.levels.find((l) => l.level === 0.075)!;
    expect(meshComponents(high.mesh)).toBeGreaterThanOrEqual(2);
  });

  it("the all-Gaussian scenario's shells are single nested bodies", () => {
    const b = bundle("mesh_s1");
    for (const lv of b.levels) {
      expect(meshComponents(lv.mesh)).toBe(1);
    }
    // nesting: each inner shell's bounding box sits inside the outer one
    for (let i = 1; i < b.levels.length; i++) {
      const outer = meshBounds(b.levels[i - 1].mesh)!;
      const inner = meshBounds(b.levels[i].mesh)!;
      for (let d = 0; d < 3; d++) {
        expect(inner.lo[d]).toBeGreaterThanOrEqual(outer.lo[d] - 1e-9);
        expect(inner.hi[d]).toBeLessThanOrEqual(outer.hi[d] + 1e-9);
      }
    }
  });

  it("the simulation-study bundle keeps three shells and drops the innermost", () => {
    const b = bundle("mesh_sim51");
    const present = b.levels.filter((l) => l.mesh.triangles.length > 0);
    expect(present).toHaveLength(3);
    const missing = b.levels.filter((l) => l.mesh.triangles.length === 0).map((l) => l.level);
    expect(missing).toEqual([0.11]);
  });
});
