export { parseCsv, requireColumns, toNumber, SchemaError } from "./csv.js";
export { buildHeatmapModel, buildLossModel } from "./model.js";
export type { HeatmapModel, LossModel, LossPanel, LossTrial } from "./model.js";
export { renderHeatmap } from "./heatmap.js";
export { renderLossPanels } from "./lossPanels.js";
export { Raster, colormap } from "./raster.js";
export { encodePng } from "./png.js";
export { run } from "./cli.js";
