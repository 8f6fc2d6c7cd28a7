/**
 * Figure assembly: sweep CSV rows -> chart series for the three figure kinds.
 *
 * fig2: loss factor vs bit depth, one curve per SNR (finite bits only --
 *       infinite resolution has no place on a numeric bits axis).
 * fig3: loss factor vs SNR, one curve per bit depth.
 * fig4: estimator RMSE vs SNR on a log axis, one curve per
 *       (estimator, bits) plus a dashed root-CRLB overlay per bits value.
 *
 * Series labels are built from CSV column names and cell values; nothing
 * numeric is recomputed here, rows are grouped and passed through.
 */

import { formatBits, SweepData, SweepRow } from "./csv.js";
import { ChartDataError, ChartSpec, Series } from "./svg.js";

export type FigureKind = "fig2" | "fig3" | "fig4";

export const FIGURE_KINDS: FigureKind[] = ["fig2", "fig3", "fig4"];

function requireValues(rows: SweepRow[], column: string, picker: (r: SweepRow) => number | null): void {
  if (rows.length === 0) throw new ChartDataError("empty data: CSV has no rows");
  if (rows.every((r) => picker(r) === null)) {
    throw new ChartDataError(`missing required column values: ${column}`);
  }
}

function sortedUnique<T>(values: T[], key: (v: T) => number): T[] {
  return [...new Set(values)].sort((a, b) => key(a) - key(b));
}

const bitsOrder = (b: number) => (Number.isFinite(b) ? b : Number.MAX_VALUE);

export function buildFigure(kind: FigureKind, data: SweepData): ChartSpec {
  if (kind === "fig2") return buildFig2(data);
  if (kind === "fig3") return buildFig3(data);
  return buildFig4(data);
}

function buildFig2(data: SweepData): ChartSpec {
  const rows = data.rows.filter((r) => Number.isFinite(r.bits));
  requireValues(rows, "eta_db", (r) => r.etaDb);
  const snrs = sortedUnique(rows.map((r) => r.sweepVar), (v) => v);
  const series: Series[] = snrs.map((snr) => {
    const line = rows
      .filter((r) => r.sweepVar === snr && r.etaDb !== null)
      .sort((a, b) => a.bits - b.bits);
    return {
      label: `sweep_var=${snr}`,
      x: line.map((r) => r.bits),
      y: line.map((r) => r.etaDb as number),
    };
  });
  return {
    title: "Loss factor vs bit depth",
    xLabel: "b",
    yLabel: "eta_db",
    series,
  };
}

function buildFig3(data: SweepData): ChartSpec {
  requireValues(data.rows, "eta_db", (r) => r.etaDb);
  const bits = sortedUnique(data.rows.map((r) => r.bits), bitsOrder);
  const series: Series[] = bits.map((b) => {
    const line = data.rows
      .filter((r) => r.bits === b && r.etaDb !== null)
      .sort((a, b2) => a.sweepVar - b2.sweepVar);
    return {
      label: `b=${formatBits(b)}`,
      x: line.map((r) => r.sweepVar),
      y: line.map((r) => r.etaDb as number),
    };
  });
  return {
    title: "Loss factor vs SNR",
    xLabel: "sweep_var (dB)",
    yLabel: "eta_db",
    series,
  };
}

function buildFig4(data: SweepData): ChartSpec {
  requireValues(data.rows, "rmse_deg", (r) => r.rmseDeg);
  requireValues(data.rows, "crlb_sqrt_deg", (r) => r.crlbSqrtDeg);
  const bits = sortedUnique(data.rows.map((r) => r.bits), bitsOrder);
  const estimators = [...new Set(data.rows.map((r) => r.estimator).filter((e) => e !== ""))].sort();

  const series: Series[] = [];
  for (const b of bits) {
    for (const estimator of estimators) {
      const line = data.rows
        .filter((r) => r.bits === b && r.estimator === estimator && r.rmseDeg !== null)
        .sort((a, b2) => a.sweepVar - b2.sweepVar);
      if (line.length === 0) continue;
      series.push({
        label: `${estimator} b=${formatBits(b)}`,
        x: line.map((r) => r.sweepVar),
        y: line.map((r) => r.rmseDeg as number),
      });
    }
    // one dashed bound overlay per bits value, deduplicated across estimators
    const boundRows = new Map<number, number>();
    for (const r of data.rows) {
      if (r.bits === b && r.crlbSqrtDeg !== null) boundRows.set(r.sweepVar, r.crlbSqrtDeg);
    }
    const xs = [...boundRows.keys()].sort((a, b2) => a - b2);
    if (xs.length > 0) {
      series.push({
        label: `crlb_sqrt_deg b=${formatBits(b)}`,
        x: xs,
        y: xs.map((x) => boundRows.get(x) as number),
        dashed: true,
      });
    }
  }
  return {
    title: "RMSE vs SNR",
    xLabel: "sweep_var (dB)",
    yLabel: "rmse_deg",
    series,
    logY: true,
  };
}
