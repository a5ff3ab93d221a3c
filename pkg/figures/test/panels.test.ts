import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { parseCsv } from "../src/csv.js";
import {
  renderAmplificationPanel,
  renderMainFigure,
  renderRefinementFigure,
  renderSensitivityPanel,
  rmsDeviation,
} from "../src/panels.js";
import { jointTorqueNorms } from "../src/torques.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture(name: string) {
  return parseCsv(readFileSync(join(FIXTURES, name), "utf8"), name);
}

describe("sensitivity panel", () => {
  it("renders exactly one bar per joint (24)", () => {
    const parts = renderSensitivityPanel(fixture("sensitivity.csv"), 0, 20, 400, 300).join("");
    const bars = parts.match(/class="bar"/g) ?? [];
    expect(bars).toHaveLength(24);
  });
});

describe("amplification panel", () => {
  it("shades the typical-noise sigma band", () => {
    const parts = renderAmplificationPanel(fixture("amplification.csv"), 60, 40, 380, 280).join("");
    expect(parts).toContain('class="sigma-band"');
  });

  it("fails loudly when a column is missing", () => {
    const broken = parseCsv("sigma,std_nm,n\n0.05,1,10\n", "amplification.csv");
    expect(() => renderAmplificationPanel(broken, 0, 0, 100, 100)).toThrow(/missing column 'mean_nm'/);
  });
});

describe("main figure", () => {
  it("composes all four panels into one SVG", () => {
    const svg = renderMainFigure({
      amplification: fixture("amplification.csv"),
      sensitivity: fixture("sensitivity.csv"),
      cutoff: fixture("cutoff.csv"),
      realistic: fixture("realistic.csv"),
    });
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("(a) Noise amplification");
    expect(svg).toContain("(b) Per-joint sensitivity");
    expect(svg).toContain("(c) Low-pass cutoff trade-off");
    expect(svg).toContain("(d) Noise model x filtering");
  });
});

describe("refinement figure", () => {
  function hipSeries() {
    const read = (name: string) =>
      jointTorqueNorms(readFileSync(join(FIXTURES, name), "utf8"), "left_hip", name);
    return {
      clean: read("torque_clean.csv"),
      noisy: read("torque_noisy.csv"),
      refined: read("torque_refined.csv"),
    };
  }

  it("renders three trajectories with the RMS annotation", () => {
    const svg = renderRefinementFigure(hipSeries());
    expect((svg.match(/<polyline /g) ?? []).length).toBe(3);
    expect(svg).toContain("RMS dev vs clean");
  });

  it("refined deviates less from clean than noisy does", () => {
    const hip = hipSeries();
    expect(rmsDeviation(hip.refined, hip.clean)).toBeLessThan(rmsDeviation(hip.noisy, hip.clean));
  });

  it("identical clean and refined series draw coincident lines", () => {
    const hip = hipSeries();
    const svg = renderRefinementFigure({ clean: hip.clean, noisy: hip.noisy, refined: hip.clean });
    const points = [...svg.matchAll(/<polyline points="([^"]+)"/g)].map((m) => m[1]);
    expect(points).toHaveLength(3);
    expect(points[1]).toBe(points[2]); // clean and refined trajectories overlap exactly
  });

  it("rejects mismatched series lengths", () => {
    expect(() => rmsDeviation([1, 2], [1])).toThrow(/length mismatch/);
  });
});
