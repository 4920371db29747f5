/** Data models extracted from campaign CSVs.
 *
 * Values are stored exactly as parsed; all scaling happens at draw time, so
 * the model is a faithful round-trip of the file contents.
 */

import { CsvTable, requireColumns, toNumber } from "./csv.js";

export interface HeatmapModel {
  /** ascending distinct signal dimensions */
  ns: number[];
  /** ascending distinct measurement counts */
  ms: number[];
  /** values[i][j] = mean opnorm at (ns[i], ms[j]); NaN marks missing cells */
  values: number[][];
  maxValue: number;
}

export function buildHeatmapModel(table: CsvTable): HeatmapModel {
  const [nIdx, mIdx, vIdx] = requireColumns(table, ["n", "m", "mean_opnorm"]);
  const ns = [...new Set(table.rows.map((r) => toNumber(r[nIdx], "n")))].sort(
    (a, b) => a - b,
  );
  const ms = [...new Set(table.rows.map((r) => toNumber(r[mIdx], "m")))].sort(
    (a, b) => a - b,
  );
  const values = ns.map(() => ms.map(() => Number.NaN));
  let maxValue = 0;
  for (const row of table.rows) {
    const n = toNumber(row[nIdx], "n");
    const m = toNumber(row[mIdx], "m");
    const v = toNumber(row[vIdx], "mean_opnorm");
    values[ns.indexOf(n)][ms.indexOf(m)] = v;
    if (v > maxValue) maxValue = v;
  }
  return { ns, ms, values, maxValue };
}

export interface LossTrial {
  trial: number;
  ks: number[];
  losses: number[];
}

export interface LossPanel {
  m: number;
  trials: LossTrial[];
}

export interface LossModel {
  panels: LossPanel[];
}

export function buildLossModel(table: CsvTable): LossModel {
  const [mIdx, tIdx, kIdx, lIdx] = requireColumns(table, [
    "m",
    "trial",
    "k",
    "normalized_loss",
  ]);
  const panels = new Map<number, Map<number, LossTrial>>();
  for (const row of table.rows) {
    const m = toNumber(row[mIdx], "m");
    const trial = toNumber(row[tIdx], "trial");
    const k = toNumber(row[kIdx], "k");
    const loss = toNumber(row[lIdx], "normalized_loss");
    let byTrial = panels.get(m);
    if (!byTrial) {
      byTrial = new Map();
      panels.set(m, byTrial);
    }
    let series = byTrial.get(trial);
    if (!series) {
      series = { trial, ks: [], losses: [] };
      byTrial.set(trial, series);
    }
    series.ks.push(k);
    series.losses.push(loss);
  }
  const ordered = [...panels.keys()].sort((a, b) => a - b);
  return {
    panels: ordered.map((m) => ({
      m,
      trials: [...panels.get(m)!.values()].sort((a, b) => a.trial - b.trial),
    })),
  };
}
