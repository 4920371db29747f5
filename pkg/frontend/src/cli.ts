#!/usr/bin/env node
/** render --kind {heatmap|loss} --in <csv> --out <png> [--contour x] [--floor x]
 *
 * Exit codes: 0 success, 1 usage error, 2 schema/runtime failure (the
 * offending column is named for schema mismatches).
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseCsv, SchemaError } from "./csv.js";
import { buildHeatmapModel, buildLossModel } from "./model.js";
import { renderHeatmap } from "./heatmap.js";
import { renderLossPanels } from "./lossPanels.js";
import { encodePng } from "./png.js";

interface Args {
  kind: "heatmap" | "loss";
  input: string;
  output: string;
  contour?: number;
  floor?: number;
}

class UsageError extends Error {}

function parseArgs(argv: string[]): Args {
  const out: Partial<Args> = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new UsageError(`flag ${flag} needs a value`);
      return argv[++i];
    };
    switch (flag) {
      case "--kind": {
        const kind = next();
        if (kind !== "heatmap" && kind !== "loss") {
          throw new UsageError(`--kind must be heatmap or loss, got "${kind}"`);
        }
        out.kind = kind;
        break;
      }
      case "--in":
        out.input = next();
        break;
      case "--out":
        out.output = next();
        break;
      case "--contour":
        out.contour = Number(next());
        break;
      case "--floor":
        out.floor = Number(next());
        break;
      default:
        throw new UsageError(`unknown flag "${flag}"`);
    }
  }
  if (!out.kind || !out.input || !out.output) {
    throw new UsageError("required: --kind {heatmap|loss} --in <csv> --out <png>");
  }
  return out as Args;
}

export function run(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  try {
    const table = parseCsv(readFileSync(args.input, "utf8"));
    const raster =
      args.kind === "heatmap"
        ? renderHeatmap(buildHeatmapModel(table), { contourLevel: args.contour })
        : renderLossPanels(buildLossModel(table), { floor: args.floor });
    writeFileSync(args.output, encodePng(raster));
    return 0;
  } catch (err) {
    const prefix = err instanceof SchemaError ? "schema error" : "error";
    console.error(`${prefix}: ${(err as Error).message}`);
    return 2;
  }
}

const isMain = process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (isMain) {
  process.exit(run(process.argv.slice(2)));
}
