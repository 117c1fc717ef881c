/**
 * 2-D canvas panels: margin contour lines for the three pairs and the
 * conditional Kendall's-tau curve with an optional fitted-constant overlay.
 */
import { MarginsResponse, TauCurveResponse } from "./schemas";

const MARGIN_COLORS = ["#4c78a8", "#72b7b2", "#eeca3b", "#e45756"];

function setupCanvas(canvas: HTMLCanvasElement): CanvasRenderingContext2D {
  const ctx = canvas.getContext("2d")!;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

export function drawMargins(canvas: HTMLCanvasElement, resp: MarginsResponse): void {
  const ctx = setupCanvas(canvas);
  const [loX, loY] = resp.grid.lo;
  const [hiX, hiY] = resp.grid.hi;
  const sx = (x: number) => ((x - loX) / (hiX - loX)) * canvas.width;
  const sy = (y: number) => canvas.height - ((y - loY) / (hiY - loY)) * canvas.height;

  ctx.strokeStyle = "#999";
  ctx.strokeRect(0, 0, canvas.width, canvas.height);
  resp.contours.forEach((cs, i) => {
    ctx.strokeStyle = MARGIN_COLORS[i % MARGIN_COLORS.length];
    ctx.lineWidth = 1.2;
    cs.polylines.forEach((line, k) => {
      if (line.length < 2) return;
      ctx.beginPath();
      ctx.moveTo(sx(line[0][0]), sy(line[0][1]));
      for (let j = 1; j < line.length; j++) ctx.lineTo(sx(line[j][0]), sy(line[j][1]));
      if (cs.closed[k]) ctx.closePath();
      ctx.stroke();
    });
  });
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(`pair ${resp.pair}`, 6, 14);
}

export interface TauOverlay {
  constant?: number; // fitted constant conditional tau
}

export function drawTauCurve(
  canvas: HTMLCanvasElement,
  curve: TauCurveResponse,
  overlay: TauOverlay = {},
): { min: number; max: number } {
  const ctx = setupCanvas(canvas);
  const w = canvas.width;
  const h = canvas.height;
  const sx = (u: number) => u * w;
  const sy = (t: number) => h / 2 - (t * h) / 2.2; // tau in [-1, 1]

  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.moveTo(0, sy(0));
  ctx.lineTo(w, sy(0));
  ctx.stroke();
  for (const g of [-0.5, 0.5]) {
    ctx.strokeStyle = "#eee";
    ctx.beginPath();
    ctx.moveTo(0, sy(g));
    ctx.lineTo(w, sy(g));
    ctx.stroke();
  }

  ctx.strokeStyle = "#e45756";
  ctx.lineWidth = 1.6;
  ctx.beginPath();
  curve.u2.forEach((u, i) => {
    const x = sx(u);
    const y = sy(curve.tau[i]);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();

  if (overlay.constant !== undefined) {
    ctx.strokeStyle = "#4c78a8";
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(0, sy(overlay.constant));
    ctx.lineTo(w, sy(overlay.constant));
    ctx.stroke();
    ctx.setLineDash([]);
  }

  const min = Math.min(...curve.tau);
  const max = Math.max(...curve.tau);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(`tau(u2) range [${min.toFixed(2)}, ${max.toFixed(2)}]`, 6, 14);
  return { min, max };
}

/** Preview range of a tau curve, used by the parameter-function editor. */
export function tauRange(curve: TauCurveResponse): { min: number; max: number } {
  return { min: Math.min(...curve.tau), max: Math.max(...curve.tau) };
}
