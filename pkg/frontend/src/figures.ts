/** Figure builders over the escapelab CSV schemas.
 *
 * fig1: full damped-oscillation trajectory (t, v, vstar, p)
 * fig2: first-cycle anatomy with vertical stage-time markers
 * fig3: phi_lim (dashed) and psi_lim (solid) over f with regime labels
 * outcomes: observed outcome frequencies vs predicted masses
 * partitions: ancestor-count distribution of sampled lineage partitions
 */

import { SchemaError, Table, numericColumns, stringColumn } from "./csv.js";
import { Scene } from "./svg.js";

const SERIES_COLORS: Record<string, string> = {
  v: "#1f77b4",
  vstar: "#d62728",
  p: "#2ca02c",
};

function trajectoryScene(table: Table, title: string, tMax?: number): Scene {
  const [t, v, vs, p] = numericColumns(table, ["t", "v", "vstar", "p"]);
  const scene = new Scene(860, 420, title);
  const hi = tMax ?? t[t.length - 1];
  const yMax = Math.max(...v, ...vs, ...p) * 1.05;
  const [sx, sy] = scene.scales([t[0], hi], [0, yMax]);
  scene.axes(sx, sy, "time", "scaled density");
  scene.polyline(t, v, sx, sy, SERIES_COLORS.v);
  scene.polyline(t, vs, sx, sy, SERIES_COLORS.vstar);
  scene.polyline(t, p, sx, sy, SERIES_COLORS.p);
  scene.legend([
    { label: "wild type v", color: SERIES_COLORS.v },
    { label: "mutant v*", color: SERIES_COLORS.vstar },
    { label: "predator p", color: SERIES_COLORS.p },
  ]);
  return scene;
}

export function renderFig1(traj: Table): string {
  return trajectoryScene(traj, "Damped escape oscillations").render();
}

export function renderFig2(traj: Table, stages: Table): string {
  const [cycle] = numericColumns(stages, ["cycle"]);
  const names = ["T_s", "T_I", "T_II", "T_III", "T_IV"];
  const times = numericColumns(stages, names);
  const first = cycle.indexOf(1);
  if (first < 0) {
    throw new SchemaError("stage-times CSV has no cycle 1");
  }
  const tEnd = times[4][first] * 1.05;
  const scene = trajectoryScene(traj, "First cycle: stage decomposition", tEnd);
  const [t] = numericColumns(traj, ["t"]);
  const yMaxCols = numericColumns(traj, ["v", "vstar", "p"]);
  const yMax = Math.max(...yMaxCols.flat()) * 1.05;
  const [sx] = scene.scales([t[0], tEnd], [0, yMax]);
  names.forEach((name, i) => {
    scene.verticalMarker(times[i][first], sx, name.replace("T_", "T"));
  });
  return scene.render();
}

export function renderFig3(limits: Table, alpha = 1.0): string {
  const [f, phi, psi] = numericColumns(limits, ["f", "phi_lim", "psi_lim"]);
  const scene = new Scene(860, 460, "Outcome regimes over mutant fitness");
  // cut phi off (it diverges toward f = 1) to keep presentable scales
  const psiMax = Math.max(...psi);
  const yCut = Math.max(4 * psiMax, 0.1);
  const [sx, sy] = scene.scales([f[0], f[f.length - 1]], [0, yCut]);
  scene.axes(sx, sy, "mutant fitness f", "limit exponent");
  const phiCut = phi.map((x) => (x > yCut ? NaN : x));
  scene.polyline(f, phiCut, sx, sy, "#1f77b4", { dashed: true });
  scene.polyline(f, psi, sx, sy, "#d62728");
  scene.legend([
    { label: "phi_lim (dashed)", color: "#1f77b4", dashed: true },
    { label: "psi_lim (solid)", color: "#d62728" },
  ]);
  // regime annotations: beta above both curves -> coexistence; beta under
  // phi -> wild type lost; beta under psi (only below the crossing) ->
  // mutant lost after rising
  const a = scene.plotArea();
  scene.text((a.x0 + a.x1) / 2, a.y1 + 28, "beta above both: coexistence", {
    size: 11,
    color: "#444",
  });
  scene.text((a.x0 + a.x1) / 2, a.y1 + 44, "beta below phi_lim: wild type lost", {
    size: 11,
    color: "#1f77b4",
  });
  scene.text((a.x0 + a.x1) / 2, a.y1 + 60, "beta below psi_lim (left of crossing): mutant lost", {
    size: 11,
    color: "#d62728",
  });
  return scene.render();
}

const OUTCOME_ORDER = [
  "FailedMutant",
  "MutantLostAfterRise",
  "WildLost",
  "Coexistence",
  "Unresolved",
];

export function renderOutcomes(outcomes: Table, report?: Table): string {
  const labels = stringColumn(outcomes, "outcome");
  const counts = new Map<string, number>();
  for (const l of labels) counts.set(l, (counts.get(l) ?? 0) + 1);
  const n = labels.length;
  const freq = OUTCOME_ORDER.map((k) => (counts.get(k) ?? 0) / n);

  let predicted: Array<number | null> = OUTCOME_ORDER.map(() => null);
  if (report) {
    const get = (name: string) => {
      const col = stringColumn(report, name)[0];
      return col === "" ? null : Number(col);
    };
    predicted = [
      get("P_uW_failed"),
      get("P_uW_lost"),
      get("P_uM"),
      get("P_uC"),
      null,
    ];
  }

  const scene = new Scene(860, 420, `Outcome frequencies (n = ${n})`);
  const areaBox = scene.plotArea();
  const [sx, sy] = scene.scales([0, OUTCOME_ORDER.length], [0, 1]);
  scene.axes(sx, sy, "", "probability mass");
  const slot = (areaBox.x1 - areaBox.x0) / OUTCOME_ORDER.length;
  OUTCOME_ORDER.forEach((name, i) => {
    const x0 = areaBox.x0 + i * slot;
    const h = freq[i] * (areaBox.y0 - areaBox.y1);
    scene.bar(x0 + slot * 0.12, areaBox.y0 - h, slot * 0.33, h, "#1f77b4");
    const pred = predicted[i];
    if (pred !== null && Number.isFinite(pred)) {
      const hp = pred * (areaBox.y0 - areaBox.y1);
      scene.bar(x0 + slot * 0.52, areaBox.y0 - hp, slot * 0.33, hp, "#ff7f0e");
    }
    scene.text(x0 + slot / 2, areaBox.y0 + 28, name, { size: 9 });
  });
  scene.legend([
    { label: "observed", color: "#1f77b4" },
    { label: "predicted", color: "#ff7f0e" },
  ]);
  return scene.render();
}

export function renderPartitions(partitions: Table): string {
  const [n0s, ns] = numericColumns(partitions, ["n0", "n"]);
  const n = ns[0];
  const counts = new Map<number, number>();
  for (const k of n0s) counts.set(k, (counts.get(k) ?? 0) + 1);
  const total = n0s.length;
  const scene = new Scene(860, 420, `Ancestor count of ${n} sampled lineages (${total} replicates)`);
  const areaBox = scene.plotArea();
  const maxFreq = Math.max(...[...counts.values()].map((c) => c / total));
  const [sx, sy] = scene.scales([0.5, n + 0.5], [0, maxFreq * 1.15]);
  scene.axes(sx, sy, "ancestors at time 0 (n0)", "frequency");
  const w = (sx.apply(1.9) - sx.apply(1.0)) * 0.8;
  for (let k = 1; k <= n; k++) {
    const fr = (counts.get(k) ?? 0) / total;
    if (fr === 0) continue;
    const h = sy.apply(0) - sy.apply(fr);
    scene.bar(sx.apply(k) - w / 2, sy.apply(fr), w, h, "#1f77b4");
  }
  return scene.render();
}
