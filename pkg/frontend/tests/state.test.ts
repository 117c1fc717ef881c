import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { ScenarioListSchema, VineSpec } from "../src/schemas";
import { PARAM_TO_TAU, TAU_TO_PARAM, ViewState, VIEWPOINTS } from "../src/state";

const scenarios = ScenarioListSchema.parse(
  JSON.parse(readFileSync(join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures", "scenarios.json"), "utf-8")),
);

function specOf(id: string): VineSpec {
  return JSON.parse(JSON.stringify(scenarios.find((s) => s.id === id)!.spec));
}

describe("view state", () => {
  it("starts as the gallery landing view with nothing selected", () => {
    const st = new ViewState();
    expect(st.validate().ok).toBe(false);
    expect(st.validate().reasons.join(" ")).toContain("no model selected");
  });

  it("validates a scenario spec before any request", () => {
    const st = new ViewState();
    st.setScenario("S1", specOf("S1"));
    expect(st.validate().ok).toBe(true);
    expect(st.source()).toEqual({ scenario: "S1" });
  });

  it("invalid edits disable submission with inline reasons", () => {
    const st = new ViewState();
    st.setCustomSpec(specOf("S1"));
    st.spec!.c12.params = [0.5, 0.9, 1.0];
    const v = st.validate();
    expect(v.ok).toBe(false);
    expect(v.reasons.some((r) => r.includes("parameter count"))).toBe(true);
  });

  it("level toggles feed the active level list and empty disables", () => {
    const st = new ViewState();
    st.setScenario("S5", specOf("S5"));
    expect(st.activeLevels()).toEqual([0.015, 0.035, 0.075, 0.11]);
    for (const lv of [...st.levels]) st.toggleLevel(lv.level, false);
    expect(st.activeLevels()).toEqual([]);
    expect(st.validate().ok).toBe(false);
    st.setCustomLevels([0.05, 0.02]);
    expect(st.activeLevels()).toEqual([0.02, 0.05]); // sorted ascending
  });

  it("detects simplified vs non-simplified conditionals", () => {
    const st = new ViewState();
    st.setScenario("S1", specOf("S1"));
    expect(st.isSimplified()).toBe(true);
    st.setScenario("S5", specOf("S5"));
    expect(st.isSimplified()).toBe(false);
  });

  it("ships three canonical viewpoints", () => {
    expect(VIEWPOINTS).toHaveLength(3);
    const poses = new Set(VIEWPOINTS.map((v) => `${v.pose.azimuthDeg}/${v.pose.elevationDeg}`));
    expect(poses.size).toBe(3);
  });
});

describe("tau-scale sliders", () => {
  it("the clayton slider at one half sets theta = 2", () => {
    expect(TAU_TO_PARAM.clayton(0.5)).toBeCloseTo(2.0, 12);
  });

  it("tau maps round-trip for the closed-form families", () => {
    for (const fam of ["gaussian", "clayton", "gumbel"] as const) {
      const tau = fam === "gaussian" ? -0.35 : 0.42;
      expect(PARAM_TO_TAU[fam](TAU_TO_PARAM[fam](tau))).toBeCloseTo(tau, 10);
    }
  });

  it("the S5 sine amplitude maps to the documented preview range", () => {
    // amplitude 0.9 implies a conditional-correlation range of +-0.9, hence
    // a tau preview range of +-(2/pi) asin(0.9) ~ +-0.71
    const tauMax = PARAM_TO_TAU.gaussian(0.9);
    expect(tauMax).toBeCloseTo(0.713, 3);
  });
});
