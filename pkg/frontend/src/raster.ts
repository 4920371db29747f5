/** Tiny software rasterizer: RGBA pixel buffer with rectangles, lines, and a
 * 5x7 bitmap font.  Enough for heatmaps and line charts without native deps. */

export type Color = [number, number, number, number];

export const WHITE: Color = [255, 255, 255, 255];
export const BLACK: Color = [20, 20, 20, 255];
export const GRAY: Color = [170, 170, 170, 255];

// 5x7 glyphs, one number per row, bit 4 = leftmost pixel
const GLYPHS: Record<string, number[]> = {
  "0": [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  "1": [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  "2": [0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f],
  "3": [0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e],
  "4": [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  "5": [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  "6": [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  "7": [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  "8": [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  "9": [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  "-": [0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00],
  "+": [0x00, 0x04, 0x04, 0x1f, 0x04, 0x04, 0x00],
  ".": [0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c],
  "=": [0x00, 0x00, 0x1f, 0x00, 0x1f, 0x00, 0x00],
  e: [0x00, 0x00, 0x0e, 0x11, 0x1f, 0x10, 0x0e],
  m: [0x00, 0x00, 0x1a, 0x15, 0x15, 0x15, 0x15],
  n: [0x00, 0x00, 0x16, 0x19, 0x11, 0x11, 0x11],
  k: [0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12],
  t: [0x08, 0x08, 0x1c, 0x08, 0x08, 0x09, 0x06],
  r: [0x00, 0x00, 0x16, 0x19, 0x10, 0x10, 0x10],
  i: [0x04, 0x00, 0x0c, 0x04, 0x04, 0x04, 0x0e],
  a: [0x00, 0x00, 0x0e, 0x01, 0x0f, 0x11, 0x0f],
  l: [0x0c, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0e],
  o: [0x00, 0x00, 0x0e, 0x11, 0x11, 0x11, 0x0e],
  s: [0x00, 0x00, 0x0f, 0x10, 0x0e, 0x01, 0x1e],
  " ": [0, 0, 0, 0, 0, 0, 0],
};

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;

  constructor(width: number, height: number, background: Color = WHITE) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8Array(width * height * 4);
    this.fill(background);
  }

  fill(color: Color): void {
    for (let i = 0; i < this.width * this.height; i++) {
      this.pixels.set(color, i * 4);
    }
  }

  set(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    this.pixels.set(color, (y * this.width + x) * 4);
  }

  fillRect(x: number, y: number, w: number, h: number, color: Color): void {
    const x1 = Math.max(0, Math.round(x));
    const y1 = Math.max(0, Math.round(y));
    const x2 = Math.min(this.width, Math.round(x + w));
    const y2 = Math.min(this.height, Math.round(y + h));
    for (let yy = y1; yy < y2; yy++) {
      for (let xx = x1; xx < x2; xx++) {
        this.pixels.set(color, (yy * this.width + xx) * 4);
      }
    }
  }

  /** 1px line via DDA; endpoints in pixel coordinates. */
  line(x0: number, y0: number, x1: number, y1: number, color: Color): void {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1);
    for (let s = 0; s <= steps; s++) {
      const t = s / steps;
      this.set(Math.round(x0 + t * (x1 - x0)), Math.round(y0 + t * (y1 - y0)), color);
    }
  }

  text(x: number, y: number, message: string, color: Color, scale = 1): void {
    let cx = Math.round(x);
    for (const ch of message) {
      const glyph = GLYPHS[ch] ?? GLYPHS[" "];
      for (let row = 0; row < 7; row++) {
        for (let col = 0; col < 5; col++) {
          if ((glyph[row] >> (4 - col)) & 1) {
            this.fillRect(cx + col * scale, y + row * scale, scale, scale, color);
          }
        }
      }
      cx += 6 * scale;
    }
  }
}

// viridis-like anchors, interpolated linearly
const STOPS: Array<[number, number, number]> = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

/** Map t in [0, 1] to a perceptual color ramp. */
export function colormap(t: number): Color {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (STOPS.length - 1);
  const lo = Math.min(STOPS.length - 2, Math.floor(pos));
  const frac = pos - lo;
  const a = STOPS[lo];
  const b = STOPS[lo + 1];
  return [
    Math.round(a[0] + frac * (b[0] - a[0])),
    Math.round(a[1] + frac * (b[1] - a[1])),
    Math.round(a[2] + frac * (b[2] - a[2])),
    255,
  ];
}
