// Line plots of run outputs as plain SVG markup, time on the x-axis.
// String in, string out: no DOM needed, so the plotting math is easy
// to test.

export interface Series {
  name: string;
  times: number[];
  values: number[];
}

export function parseTimeseries(text: string): Series {
  const lines = text.split(/\r?\n/).filter((line) => line.trim() !== "");
  if (lines.length === 0) throw new Error("empty file");
  const header = lines[0];
  if (!header.startsWith("time,")) {
    throw new Error("not a timeseries: header is " + JSON.stringify(header));
  }
  const name = header.slice("time,".length);
  const times: number[] = [];
  const values: number[] = [];
  for (const line of lines.slice(1)) {
    const comma = line.indexOf(",");
    const t = Number(line.slice(0, comma));
    const v = Number(line.slice(comma + 1));
    if (!Number.isFinite(t) || !Number.isFinite(v)) {
      throw new Error("bad row: " + JSON.stringify(line));
    }
    times.push(t);
    values.push(v);
  }
  return { name, times, values };
}

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];
const MARGIN = { left: 54, right: 12, top: 14, bottom: 30 };

function extent(arrays: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const array of arrays) {
    for (const v of array) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo === Infinity) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1]; // flat line still needs a band
  return [lo, hi];
}

function ticks(lo: number, hi: number, n = 5): number[] {
  const out: number[] = [];
  for (let i = 0; i < n; i++) out.push(lo + ((hi - lo) * i) / (n - 1));
  return out;
}

const fmt = (v: number): string =>
  Math.abs(v) >= 1000 || (v !== 0 && Math.abs(v) < 0.01)
    ? v.toExponential(1)
    : String(Math.round(v * 1000) / 1000);

export function linePlot(series: Series[], width = 640, height = 320): string {
  const [t0, t1] = extent(series.map((s) => s.times));
  const [v0, v1] = extent(series.map((s) => s.values));
  const x = (t: number): number =>
    MARGIN.left + ((t - t0) / (t1 - t0)) * (width - MARGIN.left - MARGIN.right);
  const y = (v: number): number =>
    height - MARGIN.bottom - ((v - v0) / (v1 - v0)) * (height - MARGIN.top - MARGIN.bottom);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `font-family="sans-serif" font-size="11">`
  );
  for (const t of ticks(t0, t1)) {
    parts.push(
      `<line x1="${x(t)}" y1="${height - MARGIN.bottom}" x2="${x(t)}" ` +
        `y2="${height - MARGIN.bottom + 4}" stroke="#444"/>` +
        `<text x="${x(t)}" y="${height - 8}" text-anchor="middle">${fmt(t)}</text>`
    );
  }
  for (const v of ticks(v0, v1)) {
    parts.push(
      `<line x1="${MARGIN.left - 4}" y1="${y(v)}" x2="${MARGIN.left}" ` +
        `y2="${y(v)}" stroke="#444"/>` +
        `<text x="${MARGIN.left - 7}" y="${y(v) + 4}" text-anchor="end">${fmt(v)}</text>`
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" ` +
      `width="${width - MARGIN.left - MARGIN.right}" ` +
      `height="${height - MARGIN.top - MARGIN.bottom}" fill="none" stroke="#444"/>`
  );
  series.forEach((s, i) => {
    const points = s.times
      .map((t, k) => `${x(t).toFixed(2)},${y(s.values[k]).toFixed(2)}`)
      .join(" ");
    const color = COLORS[i % COLORS.length];
    parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.5" points="${points}"/>`
    );
    parts.push(
      `<text x="${width - MARGIN.right - 6}" y="${MARGIN.top + 14 + i * 14}" ` +
        `text-anchor="end" fill="${color}">${s.name}</text>`
    );
  });
  parts.push(
    `<text x="${(MARGIN.left + width - MARGIN.right) / 2}" y="${height - 18}" ` +
      `text-anchor="middle" fill="#444">time</text>`
  );
  parts.push("</svg>");
  return parts.join("");
}
