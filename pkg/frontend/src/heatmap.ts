/** Operator-norm heatmap: measurement count on the horizontal axis, signal
 * dimension on the vertical axis, cell color = mean estimate on a [0, max]
 * scale, with an iso-line overlay at a configurable threshold level. */

import { HeatmapModel } from "./model.js";
import { Raster, WHITE, BLACK, GRAY, colormap } from "./raster.js";

export interface HeatmapOptions {
  cellWidth?: number;
  cellHeight?: number;
  /** iso-contour level; the default matches the concentration threshold 0.4 */
  contourLevel?: number;
}

const MARGIN_LEFT = 46;
const MARGIN_BOTTOM = 34;
const MARGIN_TOP = 28;
const MARGIN_RIGHT = 14;

export function renderHeatmap(model: HeatmapModel, options: HeatmapOptions = {}): Raster {
  const cw = options.cellWidth ?? 72;
  const ch = options.cellHeight ?? 48;
  const level = options.contourLevel ?? 0.4;
  const cols = model.ms.length;
  const rows = model.ns.length;
  const width = MARGIN_LEFT + cols * cw + MARGIN_RIGHT;
  const height = MARGIN_TOP + rows * ch + MARGIN_BOTTOM;
  const raster = new Raster(width, height, WHITE);
  const scale = model.maxValue > 0 ? model.maxValue : 1;

  for (let i = 0; i < rows; i++) {
    for (let j = 0; j < cols; j++) {
      const value = model.values[i][j];
      const x = MARGIN_LEFT + j * cw;
      const y = MARGIN_TOP + i * ch;
      if (Number.isNaN(value)) {
        raster.fillRect(x, y, cw, ch, GRAY);
      } else {
        raster.fillRect(x, y, cw, ch, colormap(value / scale));
      }
    }
  }

  // iso-line at `level` via marching squares on the cell-center grid
  const cx = (j: number) => MARGIN_LEFT + (j + 0.5) * cw;
  const cy = (i: number) => MARGIN_TOP + (i + 0.5) * ch;
  const lerp = (a: number, b: number) => (level - a) / (b - a);
  for (let i = 0; i + 1 < rows; i++) {
    for (let j = 0; j + 1 < cols; j++) {
      const corners = [
        model.values[i][j],
        model.values[i][j + 1],
        model.values[i + 1][j + 1],
        model.values[i + 1][j],
      ];
      if (corners.some(Number.isNaN)) continue;
      const pts: Array<[number, number]> = [];
      const edges: Array<[number, number, number, number, number, number]> = [
        // ax, ay, bx, by, value index a, value index b
        [cx(j), cy(i), cx(j + 1), cy(i), 0, 1],
        [cx(j + 1), cy(i), cx(j + 1), cy(i + 1), 1, 2],
        [cx(j + 1), cy(i + 1), cx(j), cy(i + 1), 2, 3],
        [cx(j), cy(i + 1), cx(j), cy(i), 3, 0],
      ];
      for (const [ax, ay, bx, by, ia, ib] of edges) {
        const va = corners[ia];
        const vb = corners[ib];
        if ((va < level) !== (vb < level)) {
          const t = lerp(va, vb);
          pts.push([ax + t * (bx - ax), ay + t * (by - ay)]);
        }
      }
      for (let p = 0; p + 1 < pts.length; p += 2) {
        raster.line(pts[p][0], pts[p][1], pts[p + 1][0], pts[p + 1][1], WHITE);
        raster.line(pts[p][0] + 1, pts[p][1], pts[p + 1][0] + 1, pts[p + 1][1], BLACK);
      }
    }
  }

  for (let j = 0; j < cols; j++) {
    raster.text(MARGIN_LEFT + j * cw + 4, height - MARGIN_BOTTOM + 6, `m=${model.ms[j]}`, BLACK);
  }
  for (let i = 0; i < rows; i++) {
    raster.text(4, MARGIN_TOP + i * ch + Math.floor(ch / 2) - 3, `n=${model.ns[i]}`, BLACK);
  }
  raster.text(MARGIN_LEFT, 8, `norm 0 .. ${model.maxValue.toPrecision(3)}`, BLACK);
  return raster;
}
