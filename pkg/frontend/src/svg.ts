/**
 * Minimal deterministic SVG line charts.
 *
 * No timestamps, no randomness: identical input produces byte-identical
 * markup. Each polyline carries the exact numbers it displays in
 * `data-x` / `data-y` attributes so tests can recover the plotted series
 * without reverse-engineering pixel coordinates.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  dashed?: boolean;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logY?: boolean;
}

export class ChartDataError extends Error {}

const WIDTH = 760;
const HEIGHT = 500;
const MARGIN = { top: 48, right: 220, bottom: 56, left: 72 };

// Stable palette; series are colored by sorted label so reruns and
// reorderings of the input keep the same color per label.
const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
  "#bcbd22",
  "#e377c2",
];

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 2.5 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + 1e-12 * span; v += chosen) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e += 1) {
    const v = Math.pow(10, e);
    if (v >= lo / 1.0001 && v <= hi * 1.0001) ticks.push(v);
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-3) return value.toExponential(0);
  return String(Math.round(value * 1e6) / 1e6);
}

export function renderChart(spec: ChartSpec): string {
  if (spec.series.length === 0 || spec.series.every((s) => s.x.length === 0)) {
    throw new ChartDataError("empty data: nothing to plot");
  }
  for (const s of spec.series) {
    if (s.x.length !== s.y.length) {
      throw new ChartDataError(`series ${s.label}: x and y lengths differ`);
    }
    if (spec.logY && s.y.some((v) => !(v > 0))) {
      throw new ChartDataError(`series ${s.label}: log axis needs positive values`);
    }
  }

  const xs = spec.series.flatMap((s) => s.x);
  const ys = spec.series.flatMap((s) => s.y);
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  if (xLo === xHi) {
    xLo -= 1;
    xHi += 1;
  }
  let yLo = Math.min(...ys);
  let yHi = Math.max(...ys);
  if (yLo === yHi) {
    yLo = spec.logY ? yLo / 2 : yLo - 1;
    yHi = spec.logY ? yHi * 2 : yHi + 1;
  } else if (!spec.logY) {
    const pad = 0.05 * (yHi - yLo);
    yLo -= pad;
    yHi += pad;
  } else {
    yLo /= 1.5;
    yHi *= 1.5;
  }

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) => {
    const t = spec.logY
      ? (Math.log10(y) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo))
      : (y - yLo) / (yHi - yLo);
    return MARGIN.top + (1 - t) * plotH;
  };

  const colorByLabel = new Map<string, string>();
  [...new Set(spec.series.map((s) => s.label))]
    .sort()
    .forEach((label, k) => colorByLabel.set(label, PALETTE[k % PALETTE.length]));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="24" text-anchor="middle" font-size="16">${escapeXml(spec.title)}</text>`,
  );

  const xTicks = niceTicks(xLo, xHi);
  const yTicks = spec.logY ? logTicks(yLo, yHi) : niceTicks(yLo, yHi);
  for (const t of xTicks) {
    const x = px(t).toFixed(2);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${x}" y="${MARGIN.top + plotH + 20}" text-anchor="middle" font-size="12">${formatTick(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const y = py(t).toFixed(2);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" y2="${y}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="12">${formatTick(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  spec.series.forEach((s, index) => {
    const color = colorByLabel.get(s.label)!;
    const points = s.x.map((x, k) => `${px(x).toFixed(2)},${py(s.y[k]).toFixed(2)}`).join(" ");
    const dash = s.dashed ? ' stroke-dasharray="7 4"' : "";
    parts.push(
      `<polyline data-series="${escapeXml(s.label)}" data-x="${s.x.map(String).join(" ")}" data-y="${s.y.map(String).join(" ")}" fill="none" stroke="${color}"${dash} stroke-width="1.8" points="${points}"/>`,
    );
    const ly = MARGIN.top + 14 + index * 18;
    const lx = MARGIN.left + plotW + 14;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${color}"${dash} stroke-width="1.8"/>`,
    );
    parts.push(
      `<text x="${lx + 32}" y="${ly}" font-size="12">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
