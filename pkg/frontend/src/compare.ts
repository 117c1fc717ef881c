/**
 * Side-by-side comparison of a non-simplified model and its simplified
 * approximation: two panes with pose-linked cameras (synchronized every
 * animation frame), plus the fit report and the tau-curve overlay.
 */
import { fetchApprox, fetchMesh, fetchTauCurve, RequestGate } from "./api";
import { ApproxResponse, VineSpec } from "./schemas";
import { SurfaceScene, syncCamera } from "./scene";
import { drawTauCurve } from "./panels";

export interface CompareElements {
  left: HTMLElement;
  right: HTMLElement;
  report: HTMLElement;
  tauCanvas: HTMLCanvasElement;
  notice: HTMLElement;
}

export class CompareView {
  private leftScene: SurfaceScene;
  private rightScene: SurfaceScene;
  private gate = new RequestGate();

  constructor(private els: CompareElements) {
    this.leftScene = new SurfaceScene(els.left);
    this.rightScene = new SurfaceScene(els.right);
    // the right camera follows the left controls each frame
    const follow = () => {
      requestAnimationFrame(follow);
      syncCamera(this.leftScene.camera, this.rightScene.camera);
    };
    follow();
  }

  async show(source: { spec?: VineSpec; scenario?: string }, levels: number[]): Promise<ApproxResponse> {
    const signal = this.gate.issue();
    this.els.notice.textContent = "fitting simplified approximation...";
    const approx = await fetchApprox({ ...source, n: 100_000, seed: 0 }, signal);
    const [truthBundle, approxBundle, curve] = await Promise.all([
      fetchMesh({ ...source, levels, grid: { n: 72, lo: -3, hi: 3 } }, signal),
      fetchMesh({ spec: approx.spec, levels, grid: { n: 72, lo: -3, hi: 3 } }, signal),
      fetchTauCurve({ ...source, points: 101 }, signal),
    ]);
    const missingL = this.leftScene.showBundle(truthBundle);
    const missingR = this.rightScene.showBundle(approxBundle);
    const cond = approx.conditional;
    this.els.report.textContent =
      `fitted conditional: ${cond.family}` +
      (cond.rotation ? ` (rot ${cond.rotation})` : "") +
      ` params [${cond.params.map((p) => p.toFixed(3)).join(", ")}]` +
      `, tau = ${cond.tau.toFixed(3)}`;
    drawTauCurve(this.els.tauCanvas, curve, { constant: cond.tau });
    const notes: string[] = [];
    if (missingL.length) notes.push(`model: levels ${missingL.join(", ")} above the density maximum`);
    if (missingR.length) notes.push(`approximation: levels ${missingR.join(", ")} absent`);
    this.els.notice.textContent = notes.join("; ");
    return approx;
  }

  cancel(): void {
    this.gate.cancel();
  }
}
