import { mkdtempSync, readFileSync, writeFileSync, statSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it, vi } from "vitest";

import { parseCsv } from "../src/csv.js";
import { buildHeatmapModel, buildLossModel } from "../src/model.js";
import { renderHeatmap } from "../src/heatmap.js";
import { renderLossPanels } from "../src/lossPanels.js";
import { encodePng } from "../src/png.js";
import { run } from "../src/cli.js";

const FIG2 = new URL("../fixtures/fig2.csv", import.meta.url).pathname;
const FIG3 = new URL("../fixtures/fig3.csv", import.meta.url).pathname;
const PNG_SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

function tmp(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "plots-")), name);
}

describe("renderers", () => {
  it("heatmap produces a nonempty PNG with the grid dimensions", () => {
    const model = buildHeatmapModel(parseCsv(readFileSync(FIG2, "utf8")));
    const raster = renderHeatmap(model);
    expect(raster.width).toBeGreaterThan(5 * 72);
    expect(raster.height).toBeGreaterThan(2 * 48);
    const png = encodePng(raster);
    expect(png.subarray(0, 8)).toEqual(PNG_SIGNATURE);
    expect(png.length).toBeGreaterThan(200);
  });

  it("loss panels render one panel per m with log-scale floor", () => {
    const model = buildLossModel(parseCsv(readFileSync(FIG3, "utf8")));
    const raster = renderLossPanels(model, { floor: 1e-16 });
    expect(raster.width).toBe(2 * 380); // two panels side by side
    const png = encodePng(raster);
    expect(png.subarray(0, 8)).toEqual(PNG_SIGNATURE);
  });

  it("re-rendering identical inputs yields identical bytes", () => {
    const model = buildHeatmapModel(parseCsv(readFileSync(FIG2, "utf8")));
    const a = encodePng(renderHeatmap(model));
    const b = encodePng(renderHeatmap(model));
    expect(a.equals(b)).toBe(true);
  });

  it("renders an empty panel with a warning when there are no trials", () => {
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const model = buildLossModel(parseCsv("m,trial,k,normalized_loss\n"));
    const raster = renderLossPanels(model);
    expect(raster.width).toBeGreaterThan(0);
    expect(warn).toHaveBeenCalledOnce();
    warn.mockRestore();
  });
});

describe("cli", () => {
  it("renders both figure kinds end to end", () => {
    const out2 = tmp("fig2.png");
    expect(run(["--kind", "heatmap", "--in", FIG2, "--out", out2])).toBe(0);
    expect(statSync(out2).size).toBeGreaterThan(200);
    const out3 = tmp("fig3.png");
    expect(run(["--kind", "loss", "--in", FIG3, "--out", out3])).toBe(0);
    expect(statSync(out3).size).toBeGreaterThan(200);
  });

  it("exits 1 on usage errors", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["--kind", "heatmap"])).toBe(1);
    expect(run(["--kind", "sculpture", "--in", FIG2, "--out", "/tmp/x.png"])).toBe(1);
    err.mockRestore();
  });

  it("exits 2 naming the column on schema mismatch", () => {
    const bad = tmp("bad.csv");
    writeFileSync(bad, "n,m,std\n1,10,0.5\n");
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["--kind", "heatmap", "--in", bad, "--out", tmp("x.png")])).toBe(2);
    expect(err.mock.calls.some((c) => String(c[0]).includes('"mean_opnorm"'))).toBe(true);
    err.mockRestore();
  });

  it("exits 2 on unreadable input", () => {
    const err = vi.spyOn(console, "error").mockImplementation(() => {});
    expect(run(["--kind", "loss", "--in", "/nonexistent.csv", "--out", tmp("x.png")])).toBe(2);
    err.mockRestore();
  });
});
