/** Extraction of per-joint torque trajectories from the dynamics CSV export. */

import { parseCsv, numericColumn, stringColumn } from "./csv.js";

/** Torque magnitude per frame for one joint from a frame,joint_name,...,tx,ty,tz table. */
export function jointTorqueNorms(csvText: string, joint: string, source = "torques.csv"): number[] {
  const table = parseCsv(csvText, source);
  const names = stringColumn(table, "joint_name", source);
  const tx = numericColumn(table, "tx", source);
  const ty = numericColumn(table, "ty", source);
  const tz = numericColumn(table, "tz", source);
  const out: number[] = [];
  for (let i = 0; i < names.length; i++) {
    if (names[i] === joint) {
      out.push(Math.hypot(tx[i], ty[i], tz[i]));
    }
  }
  if (out.length === 0) {
    throw new Error(`${source}: no rows for joint '${joint}'`);
  }
  return out;
}
