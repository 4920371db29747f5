/** Loss-curve panels: one panel per measurement count, every trial's
 * normalized loss as a polyline on a log-scale vertical axis.  Exact zeros
 * are clamped to a configurable floor so they stay plottable. */

import { LossModel } from "./model.js";
import { Raster, WHITE, BLACK, GRAY, Color } from "./raster.js";

export interface LossPanelOptions {
  panelWidth?: number;
  panelHeight?: number;
  columns?: number;
  /** log-scale floor; exact-zero losses are clamped here */
  floor?: number;
}

const PALETTE: Color[] = [
  [31, 119, 180, 255],
  [255, 127, 14, 255],
  [44, 160, 44, 255],
  [214, 39, 40, 255],
  [148, 103, 189, 255],
  [140, 86, 75, 255],
  [227, 119, 194, 255],
  [127, 127, 127, 255],
  [188, 189, 34, 255],
  [23, 190, 207, 255],
];

const PAD_LEFT = 56;
const PAD_BOTTOM = 26;
const PAD_TOP = 20;
const PAD_RIGHT = 10;

function drawPanel(
  raster: Raster,
  x0: number,
  y0: number,
  w: number,
  h: number,
  panel: { m: number; trials: { ks: number[]; losses: number[] }[] },
  floor: number,
): void {
  const plotX = x0 + PAD_LEFT;
  const plotY = y0 + PAD_TOP;
  const plotW = w - PAD_LEFT - PAD_RIGHT;
  const plotH = h - PAD_TOP - PAD_BOTTOM;
  raster.text(x0 + PAD_LEFT, y0 + 6, `m=${panel.m}`, BLACK);
  raster.line(plotX, plotY, plotX, plotY + plotH, BLACK);
  raster.line(plotX, plotY + plotH, plotX + plotW, plotY + plotH, BLACK);

  const logFloor = Math.log10(floor);
  let logMax = logFloor + 1;
  let kMax = 1;
  for (const trial of panel.trials) {
    for (const loss of trial.losses) {
      logMax = Math.max(logMax, Math.log10(Math.max(loss, floor)));
    }
    kMax = Math.max(kMax, trial.ks[trial.ks.length - 1] ?? 1);
  }
  logMax = Math.ceil(logMax);

  const xOf = (k: number) => plotX + (k / kMax) * plotW;
  const yOf = (loss: number) => {
    const t = (Math.log10(Math.max(loss, floor)) - logFloor) / (logMax - logFloor);
    return plotY + plotH - t * plotH;
  };

  const decadeStep = Math.max(1, Math.ceil((logMax - logFloor) / 6));
  for (let d = Math.ceil(logFloor); d <= logMax; d += decadeStep) {
    const y = yOf(10 ** d);
    raster.line(plotX - 3, y, plotX, y, BLACK);
    raster.line(plotX, y, plotX + plotW, y, GRAY);
    raster.text(x0 + 4, y - 3, `1e${d}`, BLACK);
  }
  for (const k of [0, Math.round(kMax / 2), kMax]) {
    const x = xOf(k);
    raster.line(x, plotY + plotH, x, plotY + plotH + 3, BLACK);
    raster.text(x - 6, plotY + plotH + 8, `${k}`, BLACK);
  }

  panel.trials.forEach((trial, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    for (let p = 0; p + 1 < trial.ks.length; p++) {
      raster.line(
        xOf(trial.ks[p]),
        yOf(trial.losses[p]),
        xOf(trial.ks[p + 1]),
        yOf(trial.losses[p + 1]),
        color,
      );
    }
  });
}

export function renderLossPanels(model: LossModel, options: LossPanelOptions = {}): Raster {
  const pw = options.panelWidth ?? 380;
  const ph = options.panelHeight ?? 240;
  const floor = options.floor ?? 1e-16;
  if (model.panels.length === 0) {
    // graceful empty rendering: one blank panel, warning on stderr
    console.warn("loss CSV contains no trials; rendering an empty panel");
    const raster = new Raster(pw, ph, WHITE);
    raster.line(PAD_LEFT, PAD_TOP, PAD_LEFT, ph - PAD_BOTTOM, BLACK);
    raster.line(PAD_LEFT, ph - PAD_BOTTOM, pw - PAD_RIGHT, ph - PAD_BOTTOM, BLACK);
    raster.text(PAD_LEFT + 10, PAD_TOP + 10, "no trials", BLACK);
    return raster;
  }
  const columns = options.columns ?? Math.min(2, model.panels.length);
  const rows = Math.ceil(model.panels.length / columns);
  const raster = new Raster(columns * pw, rows * ph, WHITE);
  model.panels.forEach((panel, idx) => {
    const col = idx % columns;
    const row = Math.floor(idx / columns);
    drawPanel(raster, col * pw, row * ph, pw, ph, panel, floor);
  });
  return raster;
}
