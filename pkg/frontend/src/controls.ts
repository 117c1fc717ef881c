/**
 * Model-assembly controls: scenario gallery, per-pair family/parameter
 * editors (with a Kendall's-tau slider where the closed-form map exists) and
 * the parameter-function editor for the conditional pair. Invalid
 * combinations disable the submit affordance with inline reasons.
 */
import { FamilyMeta, ScenarioList, VineSpec } from "./schemas";
import { PARAM_TO_TAU, TAU_TO_PARAM, ViewState, paramCount } from "./state";

export interface ControlCallbacks {
  onSpecChanged: () => void;
  onLevelsChanged: () => void;
  onCompare: () => void;
  onViewpoint: (index: number) => void;
}

const FORM_ARITY: Record<string, number> = {
  constant: 1,
  sine: 1,
  quadratic: 3,
  exp_saturation: 1,
  arctan: 3,
  sign_cosine: 3,
  linear: 2,
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

export class ControlPanel {
  readonly root = el("div", { class: "controls" });
  private submit = el("button", {}, "update view");
  private compareBtn = el("button", {}, "compare with simplified fit");
  private reasonBox = el("div", { class: "reasons" });
  private gallery = el("select");
  private editors = el("div", { class: "editors" });

  constructor(
    private state: ViewState,
    private scenarios: ScenarioList,
    private families: FamilyMeta,
    private cb: ControlCallbacks,
  ) {
    this.buildGallery();
    this.buildLevelToggles();
    this.buildViewpoints();
    this.root.appendChild(this.editors);
    this.submit.addEventListener("click", () => cb.onSpecChanged());
    this.compareBtn.addEventListener("click", () => cb.onCompare());
    this.root.appendChild(this.submit);
    this.root.appendChild(this.compareBtn);
    this.root.appendChild(this.reasonBox);
    this.refreshEditors();
  }

  private buildGallery(): void {
    const row = el("div", { class: "row" });
    row.appendChild(el("label", {}, "scenario gallery: "));
    this.gallery.appendChild(el("option", { value: "" }, "custom model"));
    for (const s of this.scenarios) {
      const opt = el("option", { value: s.id }, `${s.id}`);
      opt.title = s.description;
      this.gallery.appendChild(opt);
    }
    this.gallery.addEventListener("change", () => {
      const id = this.gallery.value;
      if (id) {
        const hit = this.scenarios.find((s) => s.id === id)!;
        this.state.setScenario(id, JSON.parse(JSON.stringify(hit.spec)));
      }
      this.refreshEditors();
      this.validate();
      this.cb.onSpecChanged();
    });
    row.appendChild(this.gallery);
    this.root.appendChild(row);
  }

  private buildLevelToggles(): void {
    const row = el("div", { class: "row levels" });
    row.appendChild(el("label", {}, "levels: "));
    for (const toggle of this.state.levels) {
      const box = el("input", { type: "checkbox" }) as HTMLInputElement;
      box.checked = toggle.enabled;
      box.addEventListener("change", () => {
        this.state.toggleLevel(toggle.level, box.checked);
        this.validate();
        this.cb.onLevelsChanged();
      });
      row.appendChild(box);
      row.appendChild(el("span", {}, String(toggle.level)));
    }
    const custom = el("input", { type: "text", placeholder: "custom: 0.02,0.05" }) as HTMLInputElement;
    custom.addEventListener("change", () => {
      const levels = custom.value
        .split(",")
        .map((s) => parseFloat(s.trim()))
        .filter((x) => Number.isFinite(x) && x > 0);
      if (levels.length) {
        this.state.setCustomLevels(levels);
        this.cb.onLevelsChanged();
      }
    });
    row.appendChild(custom);
    this.root.appendChild(row);
  }

  private buildViewpoints(): void {
    const row = el("div", { class: "row" });
    row.appendChild(el("label", {}, "viewpoints: "));
    ["view 1", "view 2", "view 3"].forEach((name, i) => {
      const btn = el("button", {}, name);
      btn.addEventListener("click", () => this.cb.onViewpoint(i));
      row.appendChild(btn);
    });
    this.root.appendChild(row);
  }

  /** Re-render the three pair editors from the current spec. */
  refreshEditors(): void {
    this.editors.textContent = "";
    const spec = this.state.spec;
    if (!spec) return;
    this.editors.appendChild(this.pairEditor("c12", spec));
    this.editors.appendChild(this.pairEditor("c23", spec));
    this.editors.appendChild(this.condEditor(spec));
  }

  private familyNames(): string[] {
    return this.families.map((f) => f.family);
  }

  private pairEditor(slot: "c12" | "c23", spec: VineSpec): HTMLElement {
    const box = el("fieldset");
    box.appendChild(el("legend", {}, slot === "c12" ? "pair 1-2" : "pair 2-3"));
    const cop = spec[slot];

    const famSel = el("select");
    for (const name of this.familyNames()) {
      const opt = el("option", { value: name }, name);
      if (name === cop.family) opt.setAttribute("selected", "");
      famSel.appendChild(opt);
    }
    famSel.addEventListener("change", () => {
      cop.family = famSel.value;
      cop.params = defaultParams(famSel.value);
      this.state.scenarioId = null;
      this.refreshEditors();
      this.validate();
    });
    box.appendChild(famSel);

    const rotSel = el("select");
    for (const r of [0, 90, 180, 270]) {
      const opt = el("option", { value: String(r) }, `rot ${r}`);
      if (r === cop.rotation) opt.setAttribute("selected", "");
      rotSel.appendChild(opt);
    }
    rotSel.addEventListener("change", () => {
      cop.rotation = parseInt(rotSel.value, 10) as 0 | 90 | 180 | 270;
      this.state.scenarioId = null;
      this.validate();
    });
    box.appendChild(rotSel);

    cop.params.forEach((value, i) => {
      const input = el("input", { type: "number", step: "0.05", value: String(value) }) as HTMLInputElement;
      input.addEventListener("change", () => {
        cop.params[i] = parseFloat(input.value);
        this.state.scenarioId = null;
        this.validate();
      });
      box.appendChild(input);
    });

    // a tau-scale slider where the closed-form map exists
    if (cop.family in TAU_TO_PARAM) {
      const slider = el("input", { type: "range", min: "-0.95", max: "0.95", step: "0.01" }) as HTMLInputElement;
      const isPositive = cop.family === "clayton" || cop.family === "gumbel";
      if (isPositive) slider.min = "0.01";
      const tauNow = PARAM_TO_TAU[cop.family]?.(cop.params[0]) ?? 0;
      slider.value = String(Number.isFinite(tauNow) ? tauNow : 0);
      const label = el("span", { class: "tau" }, ` tau=${Number(slider.value).toFixed(2)}`);
      slider.addEventListener("input", () => {
        const tau = parseFloat(slider.value);
        cop.params[0] = TAU_TO_PARAM[cop.family](tau);
        label.textContent = ` tau=${tau.toFixed(2)}`;
        this.state.scenarioId = null;
        this.refreshEditors();
        this.validate();
      });
      box.appendChild(slider);
      box.appendChild(label);
    }
    return box;
  }

  private condEditor(spec: VineSpec): HTMLElement {
    const box = el("fieldset");
    box.appendChild(el("legend", {}, "conditional pair 1-3 | 2"));
    const cond = spec.c13_2;

    const famSel = el("select");
    for (const name of this.familyNames()) {
      const opt = el("option", { value: name }, name);
      if (name === cond.family) opt.setAttribute("selected", "");
      famSel.appendChild(opt);
    }
    famSel.addEventListener("change", () => {
      cond.family = famSel.value;
      cond.param_fns = defaultParams(famSel.value).map((v) => ({
        form: "constant" as const,
        coeffs: [v],
      }));
      this.state.scenarioId = null;
      this.refreshEditors();
      this.validate();
    });
    box.appendChild(famSel);

    cond.param_fns.forEach((fn, i) => {
      const wrap = el("div", { class: "paramfn" });
      wrap.appendChild(el("span", {}, `theta${i + 1}(u2): `));
      const formSel = el("select");
      for (const form of Object.keys(FORM_ARITY)) {
        const opt = el("option", { value: form }, form);
        if (form === fn.form) opt.setAttribute("selected", "");
        formSel.appendChild(opt);
      }
      formSel.addEventListener("change", () => {
        const form = formSel.value as keyof typeof FORM_ARITY;
        cond.param_fns[i] = {
          form: form as never,
          coeffs: new Array(FORM_ARITY[form]).fill(form === "constant" ? 0.5 : 1.0),
        };
        this.state.scenarioId = null;
        this.refreshEditors();
        this.validate();
      });
      wrap.appendChild(formSel);
      fn.coeffs.forEach((c, j) => {
        const input = el("input", { type: "number", step: "0.1", value: String(c) }) as HTMLInputElement;
        input.addEventListener("change", () => {
          fn.coeffs[j] = parseFloat(input.value);
          this.state.scenarioId = null;
          this.validate();
        });
        wrap.appendChild(input);
      });
      box.appendChild(wrap);
    });

    const sign = el("select");
    for (const v of ["none", "0", "90", "180", "270"]) {
      const opt = el("option", { value: v }, v === "none" ? "no sign rotation" : `sign rot ${v}`);
      if ((cond.sign_rotation == null && v === "none") || String(cond.sign_rotation) === v) {
        opt.setAttribute("selected", "");
      }
      sign.appendChild(opt);
    }
    sign.addEventListener("change", () => {
      cond.sign_rotation = sign.value === "none" ? null : (parseInt(sign.value, 10) as 0 | 90 | 180 | 270);
      this.state.scenarioId = null;
      this.validate();
    });
    box.appendChild(sign);
    return box;
  }

  /** Validate and flip the submit affordances; returns overall validity. */
  validate(): boolean {
    const result = this.state.validate();
    this.submit.toggleAttribute("disabled", !result.ok);
    this.compareBtn.toggleAttribute(
      "disabled",
      !result.ok || this.state.isSimplified(),
    );
    this.reasonBox.textContent = result.reasons.join("; ");
    return result.ok;
  }
}

export function defaultParams(family: string): number[] {
  const defaults: Record<string, number[]> = {
    independence: [],
    gaussian: [0.5],
    student_t: [0.5, 4],
    clayton: [2],
    gumbel: [2],
    frank: [5],
    joe: [2],
    bb1: [1, 1.5],
    bb6: [1.5, 1.5],
    bb8: [3, 0.8],
    tawn1: [2, 0.5],
    tawn2: [2, 0.5],
    amh: [0.5],
  };
  return [...(defaults[family] ?? new Array(paramCount(family)).fill(1))];
}
