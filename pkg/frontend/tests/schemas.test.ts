/**
 * Contract tests: every recorded service response validates against the
 * client schemas, and client-side request validation mirrors server rules.
 */
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  ApproxResponseSchema,
  FamilyMetaSchema,
  MarginsResponseSchema,
  MeshBundleSchema,
  MeshRequestSchema,
  ScenarioListSchema,
  TauCurveRequestSchema,
  TauCurveResponseSchema,
  VineSpecSchema,
} from "../src/schemas";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

function fixture(name: string): unknown {
  return JSON.parse(readFileSync(join(FIXTURES, `${name}.json`), "utf-8"));
}

describe("recorded service responses", () => {
  it("scenario gallery parses and contains the nine entries", () => {
    const list = ScenarioListSchema.parse(fixture("scenarios"));
    expect(list.map((s) => s.id)).toEqual([
      "S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8", "SIM5.1",
    ]);
    for (const s of list) expect(VineSpecSchema.safeParse(s.spec).success).toBe(true);
  });

  it("family metadata parses with thirteen families", () => {
    const meta = FamilyMetaSchema.parse(fixture("families"));
    expect(meta).toHaveLength(13);
    const byName = Object.fromEntries(meta.map((f) => [f.family, f]));
    expect(byName["student_t"].n_params).toBe(2);
    expect(byName["clayton"].tau_invertible).toBe(true);
  });

  it("mesh bundles parse; S1 carries four populated shells", () => {
    const bundle = MeshBundleSchema.parse(fixture("mesh_s1"));
    expect(bundle.levels.map((l) => l.level)).toEqual([0.015, 0.035, 0.075, 0.11]);
    for (const lv of bundle.levels) {
      expect(lv.mesh.triangles.length).toBeGreaterThan(0);
      expect(lv.mesh.normals.length).toBe(lv.mesh.vertices.length);
    }
  });

  it("the simulation-study bundle has an empty innermost level", () => {
    const bundle = MeshBundleSchema.parse(fixture("mesh_sim51"));
    const inner = bundle.levels.find((l) => l.level === 0.11)!;
    expect(inner.mesh.triangles).toHaveLength(0);
    const outer = bundle.levels.find((l) => l.level === 0.015)!;
    expect(outer.mesh.triangles.length).toBeGreaterThan(0);
  });

  it("margins responses parse with closed flags per polyline", () => {
    const resp = MarginsResponseSchema.parse(fixture("margins_s1_13"));
    expect(resp.pair).toBe("13");
    for (const cs of resp.contours) {
      expect(cs.closed).toHaveLength(cs.polylines.length);
    }
  });

  it("tau curves parse and the S6 peak sits at one half", () => {
    const curve = TauCurveResponseSchema.parse(fixture("taucurve_s6"));
    const iMax = curve.tau.indexOf(Math.max(...curve.tau));
    expect(curve.u2[iMax]).toBeCloseTo(0.5, 1);
    expect(Math.max(...curve.tau)).toBeCloseTo(0.53, 1);
  });

  it("approximation responses parse and echo the request size", () => {
    const resp = ApproxResponseSchema.parse(fixture("approx_s2"));
    expect(resp.n).toBe(2000);
    expect(Math.abs(resp.conditional.tau - 0.25)).toBeLessThan(0.08);
  });
});

describe("request validation mirrors server rules", () => {
  it("rejects descending or nonpositive levels", () => {
    expect(
      MeshRequestSchema.safeParse({ scenario: "S1", levels: [0.075, 0.015] }).success,
    ).toBe(false);
    expect(
      MeshRequestSchema.safeParse({ scenario: "S1", levels: [0, 0.05] }).success,
    ).toBe(false);
  });

  it("requires exactly one model source", () => {
    expect(MeshRequestSchema.safeParse({}).success).toBe(false);
    const spec = ScenarioListSchema.parse(fixture("scenarios"))[0].spec;
    expect(MeshRequestSchema.safeParse({ scenario: "S1", spec }).success).toBe(false);
    expect(MeshRequestSchema.safeParse({ scenario: "S1" }).success).toBe(true);
  });

  it("bounds the grid resolution", () => {
    expect(
      MeshRequestSchema.safeParse({ scenario: "S1", grid: { n: 9999 } }).success,
    ).toBe(false);
  });

  it("rejects malformed copulas inside a custom spec", () => {
    const spec = JSON.parse(
      JSON.stringify(ScenarioListSchema.parse(fixture("scenarios"))[0].spec),
    );
    spec.c12.params = [0.5, 0.2]; // too many for gaussian
    expect(MeshRequestSchema.safeParse({ spec }).success).toBe(false);
    spec.c12.params = [0.5];
    spec.c12.rotation = 45;
    expect(MeshRequestSchema.safeParse({ spec }).success).toBe(false);
  });

  it("accepts the parameter-function forms including piecewise linear", () => {
    const ok = TauCurveRequestSchema.safeParse({
      spec: {
        margins: "std_normal",
        c12: { family: "gaussian", rotation: 0, params: [0.3] },
        c23: { family: "gaussian", rotation: 0, params: [0.3] },
        c13_2: {
          family: "gaussian",
          base_rotation: 0,
          param_fns: [
            { form: "piecewise_linear", coeffs: [0.1, 0.4], knots: [0.2, 0.8], scale: "fisher_z" },
          ],
        },
      },
    });
    expect(ok.success).toBe(true);
    const bad = TauCurveRequestSchema.safeParse({
      spec: {
        margins: "std_normal",
        c12: { family: "gaussian", rotation: 0, params: [0.3] },
        c23: { family: "gaussian", rotation: 0, params: [0.3] },
        c13_2: {
          family: "gaussian",
          base_rotation: 0,
          param_fns: [{ form: "sine", coeffs: [0.9, 1.0] }],
        },
      },
    });
    expect(bad.success).toBe(false);
  });
});
