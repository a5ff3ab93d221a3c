/** CLI: read a `smplid repro` output directory, write the two SVG figures. */

import { readFileSync, writeFileSync, mkdirSync, existsSync } from "node:fs";
import { join } from "node:path";

import { parseCsv } from "./csv.js";
import { renderMainFigure, renderRefinementFigure } from "./panels.js";
import { jointTorqueNorms } from "./torques.js";

function readCsv(dir: string, name: string) {
  const path = join(dir, name);
  if (!existsSync(path)) {
    throw new Error(`missing input: ${path} (run \`smplid repro --out ${dir}\` first)`);
  }
  return parseCsv(readFileSync(path, "utf8"), name);
}

export function renderAll(csvDir: string, outDir: string): string[] {
  mkdirSync(outDir, { recursive: true });

  const main = renderMainFigure({
    amplification: readCsv(csvDir, "amplification.csv"),
    sensitivity: readCsv(csvDir, "sensitivity.csv"),
    cutoff: readCsv(csvDir, "cutoff.csv"),
    realistic: readCsv(csvDir, "realistic.csv"),
  });
  const mainPath = join(outDir, "main_results.svg");
  writeFileSync(mainPath, main);

  const hip = {
    clean: jointTorqueNorms(readFileSync(join(csvDir, "torque_clean.csv"), "utf8"), "left_hip", "torque_clean.csv"),
    noisy: jointTorqueNorms(readFileSync(join(csvDir, "torque_noisy.csv"), "utf8"), "left_hip", "torque_noisy.csv"),
    refined: jointTorqueNorms(
      readFileSync(join(csvDir, "torque_refined.csv"), "utf8"),
      "left_hip",
      "torque_refined.csv"
    ),
  };
  const refinement = renderRefinementFigure(hip);
  const refinementPath = join(outDir, "refinement.svg");
  writeFileSync(refinementPath, refinement);

  return [mainPath, refinementPath];
}

function parseArgs(argv: string[]): { csvDir: string; outDir: string } {
  let csvDir = "";
  let outDir = "";
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--csv-dir") csvDir = argv[++i];
    else if (argv[i] === "--out-dir") outDir = argv[++i];
    else throw new Error(`unknown argument: ${argv[i]} (expected --csv-dir DIR --out-dir DIR)`);
  }
  if (!csvDir || !outDir) {
    throw new Error("usage: cli.js --csv-dir <repro output dir> --out-dir <figure dir>");
  }
  return { csvDir, outDir };
}

const isMain = process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (isMain) {
  try {
    const { csvDir, outDir } = parseArgs(process.argv.slice(2));
    const written = renderAll(csvDir, outDir);
    for (const path of written) {
      console.log(`wrote ${path}`);
    }
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(1);
  }
}
