/** Panel renderers: analysis CSV contents in, SVG fragments out. */

import { CsvTable, numericColumn, stringColumn } from "./csv.js";
import { Frame, axes, el, extent, polyline, document as svgDocument, sx, sy } from "./svg.js";

const COLORS = { clean: "#2e8b57", noisy: "#d9534f", refined: "#2a6fbb", distortion: "#e8a33d" };

export const TYPICAL_SIGMA_BAND: [number, number] = [0.03, 0.08];

function frame(x0: number, y0: number, width: number, height: number, xs: number[], ys: number[], yFromZero = true): Frame {
  const yExt = extent(ys);
  if (yFromZero) yExt.min = 0;
  return { x0, y0, width, height, xExt: extent(xs, 0.02), yExt };
}

export function renderAmplificationPanel(table: CsvTable, x0: number, y0: number, w: number, h: number): string[] {
  const sigma = numericColumn(table, "sigma", "amplification.csv");
  const mean = numericColumn(table, "mean_nm", "amplification.csv");
  const std = numericColumn(table, "std_nm", "amplification.csv");
  const f = frame(x0, y0, w, h, sigma, mean.map((m, i) => m + std[i]));
  const parts: string[] = [];

  // typical video-estimation noise band
  const [b0, b1] = TYPICAL_SIGMA_BAND;
  parts.push(
    el("rect", {
      x: sx(f, b0),
      y: f.y0,
      width: sx(f, b1) - sx(f, b0),
      height: f.height,
      fill: "#cfe2f3",
      opacity: 0.6,
      class: "sigma-band",
    })
  );
  parts.push(...axes(f, "pose noise sigma (rad)", "torque error (Nm)", "(a) Noise amplification"));
  for (let i = 0; i < sigma.length; i++) {
    const x = sx(f, sigma[i]);
    parts.push(
      el("line", { x1: x, y1: sy(f, mean[i] - std[i]), x2: x, y2: sy(f, mean[i] + std[i]), stroke: "#888" })
    );
  }
  parts.push(polyline(f, sigma, mean, COLORS.noisy, 2));
  for (let i = 0; i < sigma.length; i++) {
    parts.push(el("circle", { cx: sx(f, sigma[i]), cy: sy(f, mean[i]), r: 2.5, fill: COLORS.noisy }));
  }
  return parts;
}

export function renderSensitivityPanel(table: CsvTable, x0: number, y0: number, w: number, h: number): string[] {
  const joints = stringColumn(table, "joint", "sensitivity.csv");
  const errs = numericColumn(table, "error_nm", "sensitivity.csv");
  const parts: string[] = [];
  const left = x0 + 76;
  const width = w - 86;
  const top = y0 + 6;
  const height = h - 36;
  const barH = height / joints.length;
  const maxErr = Math.max(...errs, 1e-9);
  parts.push(
    el("text", { x: x0 + w / 2, y: y0 - 8 + 6, "text-anchor": "middle", "font-size": 12, "font-weight": "bold" }, [], "(b) Per-joint sensitivity")
  );
  joints.forEach((name, i) => {
    const y = top + i * barH;
    parts.push(
      el("rect", {
        x: left,
        y: y + 1,
        width: Math.max((errs[i] / maxErr) * width, 0.5),
        height: Math.max(barH - 2, 1),
        fill: i < 3 ? COLORS.noisy : "#7a9fc9",
        class: "bar",
      })
    );
    parts.push(
      el("text", { x: left - 4, y: y + barH / 2 + 3, "text-anchor": "end", "font-size": 7.5 }, [], name)
    );
  });
  parts.push(
    el("text", { x: left + width / 2, y: top + height + 22, "text-anchor": "middle", "font-size": 11 }, [], "total torque error (Nm), descending")
  );
  return parts;
}

export function renderCutoffPanel(table: CsvTable, x0: number, y0: number, w: number, h: number): string[] {
  const cutoff = numericColumn(table, "cutoff_hz", "cutoff.csv");
  const noise = numericColumn(table, "noise_error_nm", "cutoff.csv");
  const distortion = numericColumn(table, "distortion_nm", "cutoff.csv");
  const f = frame(x0, y0, w, h, cutoff, [...noise, ...distortion]);
  const parts = [...axes(f, "cutoff frequency (Hz)", "torque error (Nm)", "(c) Low-pass cutoff trade-off")];
  parts.push(polyline(f, cutoff, noise, COLORS.noisy, 2));
  parts.push(polyline(f, cutoff, distortion, COLORS.distortion, 2, "5,3"));
  const lx = f.x0 + f.width - 150;
  parts.push(el("line", { x1: lx, y1: f.y0 + 14, x2: lx + 24, y2: f.y0 + 14, stroke: COLORS.noisy, "stroke-width": 2 }));
  parts.push(el("text", { x: lx + 28, y: f.y0 + 17, "font-size": 10 }, [], "noise error"));
  parts.push(el("line", { x1: lx, y1: f.y0 + 28, x2: lx + 24, y2: f.y0 + 28, stroke: COLORS.distortion, "stroke-width": 2, "stroke-dasharray": "5,3" }));
  parts.push(el("text", { x: lx + 28, y: f.y0 + 31, "font-size": 10 }, [], "clean-motion distortion"));
  return parts;
}

export function renderRealisticPanel(table: CsvTable, x0: number, y0: number, w: number, h: number): string[] {
  const models = stringColumn(table, "model", "realistic.csv");
  const filtered = stringColumn(table, "filtered", "realistic.csv");
  const errs = numericColumn(table, "error_nm", "realistic.csv");
  const parts: string[] = [];
  const left = x0 + 56;
  const width = w - 76;
  const top = y0 + 6;
  const height = h - 46;
  const maxErr = Math.max(...errs, 1e-9);
  parts.push(
    el("text", { x: x0 + w / 2, y: y0 - 2, "text-anchor": "middle", "font-size": 12, "font-weight": "bold" }, [], "(d) Noise model x filtering")
  );
  const slot = width / errs.length;
  errs.forEach((e, i) => {
    const barW = slot * 0.62;
    const bx = left + i * slot + (slot - barW) / 2;
    const bh = (e / maxErr) * height;
    const isFiltered = filtered[i] === "true";
    parts.push(
      el("rect", {
        x: bx,
        y: top + height - bh,
        width: barW,
        height: Math.max(bh, 0.5),
        fill: isFiltered ? COLORS.refined : COLORS.noisy,
        class: "cell-bar",
      })
    );
    parts.push(
      el("text", { x: bx + barW / 2, y: top + height - bh - 4, "text-anchor": "middle", "font-size": 9 }, [], e.toFixed(1))
    );
    const label = `${models[i]}${isFiltered ? " + 6 Hz" : ""}`;
    parts.push(
      el("text", { x: bx + barW / 2, y: top + height + 14, "text-anchor": "middle", "font-size": 8.5 }, [], label)
    );
  });
  parts.push(
    el("text", { x: left + width / 2, y: top + height + 30, "text-anchor": "middle", "font-size": 11 }, [], "mean torque error (Nm)")
  );
  return parts;
}

export interface MainTables {
  amplification: CsvTable;
  sensitivity: CsvTable;
  cutoff: CsvTable;
  realistic: CsvTable;
}

export function renderMainFigure(tables: MainTables): string {
  const w = 980;
  const h = 760;
  const panelW = 380;
  const panelH = 280;
  const parts: string[] = [];
  parts.push(...renderAmplificationPanel(tables.amplification, 70, 40, panelW, panelH));
  parts.push(...renderSensitivityPanel(tables.sensitivity, 540, 40, panelW + 40, panelH + 20));
  parts.push(...renderCutoffPanel(tables.cutoff, 70, 420, panelW, panelH));
  parts.push(...renderRealisticPanel(tables.realistic, 540, 420, panelW, panelH));
  return svgDocument(w, h, parts);
}

export interface HipSeries {
  clean: number[];
  noisy: number[];
  refined: number[];
}

export function rmsDeviation(series: number[], reference: number[]): number {
  if (series.length !== reference.length || series.length === 0) {
    throw new Error(`series length mismatch: ${series.length} vs ${reference.length}`);
  }
  const ss = series.reduce((acc, v, i) => acc + (v - reference[i]) ** 2, 0);
  return Math.sqrt(ss / series.length);
}

export function renderRefinementFigure(hip: HipSeries, fps = 30): string {
  const frames = hip.clean.map((_, i) => i / fps);
  const all = [...hip.clean, ...hip.noisy, ...hip.refined];
  const f: Frame = { x0: 70, y0: 50, width: 600, height: 280, xExt: extent(frames, 0.01), yExt: extent(all) };
  f.yExt.min = 0;
  const parts = [...axes(f, "time (s)", "left-hip torque magnitude (Nm)", "Left-hip torque: clean vs noisy vs refined")];
  parts.push(polyline(f, frames, hip.noisy, COLORS.noisy, 1.2));
  parts.push(polyline(f, frames, hip.clean, COLORS.clean, 2));
  parts.push(polyline(f, frames, hip.refined, COLORS.refined, 2, "6,3"));

  const noisyRms = rmsDeviation(hip.noisy, hip.clean);
  const refinedRms = rmsDeviation(hip.refined, hip.clean);
  const lx = f.x0 + f.width + 14;
  const legend: Array<[string, string, string]> = [
    ["clean", COLORS.clean, ""],
    ["noisy", COLORS.noisy, ""],
    ["refined", COLORS.refined, "6,3"],
  ];
  legend.forEach(([label, color, dash], i) => {
    const y = f.y0 + 16 + i * 16;
    const attrs: Record<string, string | number> = { x1: lx, y1: y, x2: lx + 26, y2: y, stroke: color, "stroke-width": 2 };
    if (dash) attrs["stroke-dasharray"] = dash;
    parts.push(el("line", attrs));
    parts.push(el("text", { x: lx + 30, y: y + 3, "font-size": 10 }, [], label));
  });
  parts.push(
    el(
      "text",
      { x: lx, y: f.y0 + 80, "font-size": 10, class: "rms-annotation" },
      [],
      `RMS dev vs clean:`
    )
  );
  parts.push(el("text", { x: lx, y: f.y0 + 94, "font-size": 10 }, [], `noisy ${noisyRms.toFixed(1)} Nm`));
  parts.push(el("text", { x: lx, y: f.y0 + 108, "font-size": 10 }, [], `refined ${refinedRms.toFixed(1)} Nm`));
  return svgDocument(840, 390, parts);
}
