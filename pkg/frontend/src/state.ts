/**
 * View state: the current spec, the level toggles, the camera pose shared by
 * linked panes, and the comparison slot. The spec always validates against
 * the service schema before any request goes out.
 */
import { FAMILY_PARAM_COUNT, VineSpec, VineSpecSchema } from "./schemas";

export const DEFAULT_LEVELS = [0.015, 0.035, 0.075, 0.11];

// fixed opacities outer -> inner so the nesting reads visually
export const LEVEL_OPACITY = [0.18, 0.28, 0.45, 0.85];
export const LEVEL_COLORS = [0x4c78a8, 0x72b7b2, 0xeeca3b, 0xe45756];

export interface CameraPose {
  azimuthDeg: number;
  elevationDeg: number;
  distance: number;
}

// three canonical viewpoints, matching the customary row of three renders
export const VIEWPOINTS: { name: string; pose: CameraPose }[] = [
  { name: "view 1", pose: { azimuthDeg: -60, elevationDeg: 22, distance: 9 } },
  { name: "view 2", pose: { azimuthDeg: 30, elevationDeg: 22, distance: 9 } },
  { name: "view 3", pose: { azimuthDeg: 120, elevationDeg: 55, distance: 9 } },
];

export interface LevelToggle {
  level: number;
  enabled: boolean;
}

export interface ValidationResult {
  ok: boolean;
  reasons: string[];
}

export class ViewState {
  spec: VineSpec | null = null;
  scenarioId: string | null = null;
  levels: LevelToggle[] = DEFAULT_LEVELS.map((level) => ({ level, enabled: true }));
  camera: CameraPose = { ...VIEWPOINTS[0].pose };
  comparing = false;

  setScenario(id: string, spec: VineSpec): void {
    this.scenarioId = id;
    this.spec = spec;
  }

  setCustomSpec(spec: VineSpec): void {
    this.scenarioId = null;
    this.spec = spec;
  }

  activeLevels(): number[] {
    return this.levels.filter((l) => l.enabled).map((l) => l.level);
  }

  toggleLevel(level: number, enabled: boolean): void {
    const hit = this.levels.find((l) => l.level === level);
    if (hit) hit.enabled = enabled;
  }

  setCustomLevels(levels: number[]): void {
    const sorted = [...levels].sort((a, b) => a - b);
    this.levels = sorted.map((level) => ({ level, enabled: true }));
  }

  /** Validate the current spec against the service schema (client mirror). */
  validate(): ValidationResult {
    const reasons: string[] = [];
    if (!this.spec && !this.scenarioId) reasons.push("no model selected");
    if (this.spec) {
      const parsed = VineSpecSchema.safeParse(this.spec);
      if (!parsed.success) {
        for (const issue of parsed.error.issues) {
          reasons.push(`${issue.path.join(".")}: ${issue.message}`);
        }
      }
    }
    if (this.activeLevels().length === 0) reasons.push("no contour level enabled");
    return { ok: reasons.length === 0, reasons };
  }

  /** Request source fragment ({spec} or {scenario}) for the API client. */
  source(): { spec?: VineSpec; scenario?: string } {
    return this.scenarioId ? { scenario: this.scenarioId } : { spec: this.spec! };
  }

  isSimplified(): boolean {
    if (!this.spec) return true;
    return this.spec.c13_2.param_fns.every((f) => f.form === "constant");
  }
}

/** Closed-form Kendall's-tau maps used by the tau-scale sliders. */
export const TAU_TO_PARAM: Record<string, (tau: number) => number> = {
  gaussian: (t) => Math.sin((Math.PI * t) / 2),
  student_t: (t) => Math.sin((Math.PI * t) / 2),
  clayton: (t) => (2 * t) / (1 - t),
  gumbel: (t) => 1 / (1 - t),
};

export const PARAM_TO_TAU: Record<string, (p: number) => number> = {
  gaussian: (r) => (2 / Math.PI) * Math.asin(r),
  student_t: (r) => (2 / Math.PI) * Math.asin(r),
  clayton: (th) => th / (th + 2),
  gumbel: (th) => 1 - 1 / th,
};

export function paramCount(family: string): number {
  return FAMILY_PARAM_COUNT[family] ?? 0;
}
