/** Hand-rolled SVG scene building: enough for line charts and bar charts. */

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[], padFrac = 0.05): Extent {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const pad = (max - min) * padFrac;
  return { min: min - pad, max: max + pad };
}

/** Round tick positions covering the extent (1/2/5 ladder). */
export function ticks(ext: Extent, target = 5): number[] {
  const span = ext.max - ext.min;
  const rawStep = span / Math.max(target, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= target + 1) ?? 10 * mag;
  const first = Math.ceil(ext.min / step) * step;
  const out: number[] = [];
  for (let v = first; v <= ext.max + 1e-12; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000) return v.toFixed(0);
  if (a >= 10) return String(Math.round(v * 10) / 10);
  if (a >= 0.01) return String(Math.round(v * 100) / 100);
  return v.toExponential(0);
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export function el(tag: string, attrs: Record<string, string | number> = {}, children: string[] = [], text?: string): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? String(v) : esc(v)}"`)
    .join("");
  if (children.length === 0 && text === undefined) return `<${tag}${a}/>`;
  const body = text !== undefined ? esc(text) : children.join("");
  return `<${tag}${a}>${body}</${tag}>`;
}

export interface Frame {
  x0: number;
  y0: number;
  width: number;
  height: number;
  xExt: Extent;
  yExt: Extent;
}

export function sx(f: Frame, x: number): number {
  return f.x0 + ((x - f.xExt.min) / (f.xExt.max - f.xExt.min)) * f.width;
}

export function sy(f: Frame, y: number): number {
  return f.y0 + f.height - ((y - f.yExt.min) / (f.yExt.max - f.yExt.min)) * f.height;
}

export function axes(f: Frame, xLabel: string, yLabel: string, title: string): string[] {
  const parts: string[] = [];
  parts.push(
    el("rect", {
      x: f.x0,
      y: f.y0,
      width: f.width,
      height: f.height,
      fill: "none",
      stroke: "#333",
      "stroke-width": 1,
    })
  );
  for (const t of ticks(f.xExt)) {
    const x = sx(f, t);
    if (x < f.x0 - 1e-6 || x > f.x0 + f.width + 1e-6) continue;
    parts.push(el("line", { x1: x, y1: f.y0 + f.height, x2: x, y2: f.y0 + f.height + 4, stroke: "#333" }));
    parts.push(
      el("text", { x, y: f.y0 + f.height + 16, "text-anchor": "middle", "font-size": 10 }, [], fmt(t))
    );
  }
  for (const t of ticks(f.yExt)) {
    const y = sy(f, t);
    if (y < f.y0 - 1e-6 || y > f.y0 + f.height + 1e-6) continue;
    parts.push(el("line", { x1: f.x0 - 4, y1: y, x2: f.x0, y2: y, stroke: "#333" }));
    parts.push(
      el("text", { x: f.x0 - 6, y: y + 3, "text-anchor": "end", "font-size": 10 }, [], fmt(t))
    );
  }
  parts.push(
    el("text", { x: f.x0 + f.width / 2, y: f.y0 + f.height + 32, "text-anchor": "middle", "font-size": 11 }, [], xLabel)
  );
  parts.push(
    el(
      "text",
      {
        x: f.x0 - 40,
        y: f.y0 + f.height / 2,
        "text-anchor": "middle",
        "font-size": 11,
        transform: `rotate(-90 ${f.x0 - 40} ${f.y0 + f.height / 2})`,
      },
      [],
      yLabel
    )
  );
  parts.push(
    el("text", { x: f.x0 + f.width / 2, y: f.y0 - 8, "text-anchor": "middle", "font-size": 12, "font-weight": "bold" }, [], title)
  );
  return parts;
}

export function polyline(f: Frame, xs: number[], ys: number[], stroke: string, width = 1.5, dash = ""): string {
  const pts = xs.map((x, i) => `${sx(f, x).toFixed(2)},${sy(f, ys[i]).toFixed(2)}`).join(" ");
  const attrs: Record<string, string | number> = { points: pts, fill: "none", stroke, "stroke-width": width };
  if (dash) attrs["stroke-dasharray"] = dash;
  return el("polyline", attrs);
}

export function document(width: number, height: number, children: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif">` +
    el("rect", { x: 0, y: 0, width, height, fill: "white" }) +
    children.join("") +
    `</svg>`
  );
}
