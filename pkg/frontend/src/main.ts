/**
 * Viewer entry point: gallery landing view, the rotatable contour-surface
 * pane, the three margin panels, the tau-curve panel, and the
 * simplified-approximation comparison mode.
 */
import { debounce, fetchFamilies, fetchMargins, fetchMesh, fetchScenarios, fetchTauCurve, RequestGate } from "./api";
import { CompareView } from "./compare";
import { ControlPanel } from "./controls";
import { drawMargins, drawTauCurve } from "./panels";
import { SurfaceScene } from "./scene";
import { ViewState, VIEWPOINTS } from "./state";

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

async function boot(): Promise<void> {
  const state = new ViewState();
  const [scenarios, families] = await Promise.all([fetchScenarios(), fetchFamilies()]);

  const scene = new SurfaceScene(byId("surface"));
  scene.setPose(VIEWPOINTS[0].pose);
  const meshGate = new RequestGate();
  const panelGate = new RequestGate();
  const notice = byId<HTMLDivElement>("notice");
  const compareWrap = byId<HTMLDivElement>("compare-wrap");
  let compare: CompareView | null = null;

  async function refreshMesh(): Promise<void> {
    if (!state.validate().ok) return;
    const signal = meshGate.issue();
    notice.textContent = "computing surfaces...";
    try {
      const bundle = await fetchMesh(
        { ...state.source(), levels: state.activeLevels(), grid: { n: 72, lo: -3, hi: 3 } },
        signal,
      );
      const missing = scene.showBundle(bundle);
      notice.textContent = missing.length
        ? `levels ${missing.join(", ")} exceed the density maximum and are not shown`
        : "";
    } catch (err) {
      if ((err as Error).name !== "AbortError") {
        notice.textContent = `service error: ${(err as Error).message}`;
      }
    }
  }

  async function refreshPanels(): Promise<void> {
    if (!state.validate().ok) return;
    const signal = panelGate.issue();
    try {
      const levels = state.activeLevels();
      const [m12, m23, m13, curve] = await Promise.all([
        fetchMargins({ ...state.source(), pair: "12", levels, grid: { n: 64, lo: -3, hi: 3 } }, signal),
        fetchMargins({ ...state.source(), pair: "23", levels, grid: { n: 64, lo: -3, hi: 3 } }, signal),
        fetchMargins({ ...state.source(), pair: "13", levels, grid: { n: 64, lo: -3, hi: 3 } }, signal),
        fetchTauCurve({ ...state.source(), points: 101 }, signal),
      ]);
      drawMargins(byId<HTMLCanvasElement>("margin12"), m12);
      drawMargins(byId<HTMLCanvasElement>("margin23"), m23);
      drawMargins(byId<HTMLCanvasElement>("margin13"), m13);
      drawTauCurve(byId<HTMLCanvasElement>("taucurve"), curve);
    } catch (err) {
      if ((err as Error).name !== "AbortError") {
        notice.textContent = `service error: ${(err as Error).message}`;
      }
    }
  }

  const refreshAll = debounce(() => {
    void refreshMesh();
    void refreshPanels();
  }, 300);

  const controls = new ControlPanel(state, scenarios, families, {
    onSpecChanged: refreshAll,
    onLevelsChanged: refreshAll,
    onViewpoint: (i) => scene.setPose(VIEWPOINTS[i].pose),
    onCompare: () => {
      compareWrap.style.display = "grid";
      if (!compare) {
        compare = new CompareView({
          left: byId("compare-left"),
          right: byId("compare-right"),
          report: byId("compare-report"),
          tauCanvas: byId<HTMLCanvasElement>("compare-tau"),
          notice: byId("compare-notice"),
        });
      }
      if (state.isSimplified()) {
        byId("compare-notice").textContent =
          "the model is already simplified; nothing to approximate";
        return;
      }
      void compare
        .show(state.source(), state.activeLevels())
        .catch((err) => (byId("compare-notice").textContent = `fit failed: ${err.message}`));
    },
  });
  byId("controls-slot").appendChild(controls.root);
  controls.validate();

  // gallery landing view: no model selected until the user picks one
  notice.textContent = "pick a scenario from the gallery or assemble a model";
}

void boot();
