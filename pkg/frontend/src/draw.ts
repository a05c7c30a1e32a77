/** Pure SVG renderers. Payload numbers go in, markup comes out; every value
 * shown is taken from the payload verbatim, nothing is recomputed. */

import type {
  AggregateData,
  MissingRow,
  PerformancePayload,
  ProgressPayload,
  RegressionPayload,
} from "./types.js";

export const PALETTE = [
  "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
  "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd",
];

export const WIDTH = 640;
export const HEIGHT = 420;
const MARGIN = { top: 22, right: 24, bottom: 58, left: 72 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

function esc(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function px(v: number): number {
  return Math.round(v * 100) / 100;
}

function fmt(v: number): string {
  return String(Number(v.toPrecision(6)));
}

function el(
  tag: string,
  attrs: Record<string, string | number>,
  children: string | string[] = "",
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? String(v) : esc(v)}"`)
    .join("");
  const body = Array.isArray(children) ? children.join("") : children;
  return body === "" ? `<${tag}${parts}/>` : `<${tag}${parts}>${body}</${tag}>`;
}

export function linearScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): (v: number) => number {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

/** Round tick positions at a 1/2/5 step covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const raw = (hi - lo) / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const first = Math.ceil(lo / step - 1e-9) * step;
  const out: number[] = [];
  for (let i = 0; ; i++) {
    const v = first + i * step;
    if (v > hi + step * 1e-9) {
      break;
    }
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

/** Index ranges [start, end) where every series has a defined value. */
export function segments(series: (number | null)[][]): [number, number][] {
  if (series.length === 0) {
    return [];
  }
  const n = series[0].length;
  const out: [number, number][] = [];
  let start: number | null = null;
  for (let i = 0; i <= n; i++) {
    const defined = i < n && series.every((s) => s[i] !== null);
    if (defined && start === null) {
      start = i;
    } else if (!defined && start !== null) {
      out.push([start, i]);
      start = null;
    }
  }
  return out;
}

function extent(values: (number | null | undefined)[]): [number, number] | null {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (typeof v === "number" && Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (lo > hi) {
    return null;
  }
  if (lo === hi) {
    const pad = Math.abs(lo) * 0.05 || 1;
    return [lo - pad, hi + pad];
  }
  const pad = (hi - lo) * 0.05;
  return [lo - pad, hi + pad];
}

function frame(body: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
    `font-family="sans-serif" font-size="11">` +
    el("rect", { x: 0, y: 0, width: WIDTH, height: HEIGHT, fill: "#ffffff" }) +
    body.join("") +
    "</svg>"
  );
}

function yAxis(y: (v: number) => number, ticks: number[], title: string): string {
  const parts: string[] = [];
  parts.push(el("line", {
    x1: MARGIN.left, y1: MARGIN.top, x2: MARGIN.left, y2: MARGIN.top + PLOT_H,
    stroke: "#222",
  }));
  for (const t of ticks) {
    const yy = px(y(t));
    parts.push(el("line", { x1: MARGIN.left - 4, y1: yy, x2: MARGIN.left, y2: yy, stroke: "#222" }));
    parts.push(el("line", {
      x1: MARGIN.left, y1: yy, x2: MARGIN.left + PLOT_W, y2: yy,
      stroke: "#eeeeee",
    }));
    parts.push(el("text", {
      x: MARGIN.left - 7, y: yy + 3, "text-anchor": "end",
    }, esc(fmt(t))));
  }
  parts.push(el("text", {
    x: 14, y: MARGIN.top + PLOT_H / 2,
    transform: `rotate(-90 14 ${MARGIN.top + PLOT_H / 2})`,
    "text-anchor": "middle",
  }, esc(title)));
  return parts.join("");
}

function xAxisNumeric(x: (v: number) => number, ticks: number[], title: string): string {
  const y0 = MARGIN.top + PLOT_H;
  const parts: string[] = [];
  parts.push(el("line", {
    x1: MARGIN.left, y1: y0, x2: MARGIN.left + PLOT_W, y2: y0, stroke: "#222",
  }));
  for (const t of ticks) {
    const xx = px(x(t));
    parts.push(el("line", { x1: xx, y1: y0, x2: xx, y2: y0 + 4, stroke: "#222" }));
    parts.push(el("text", { x: xx, y: y0 + 16, "text-anchor": "middle" }, esc(fmt(t))));
  }
  parts.push(el("text", {
    x: MARGIN.left + PLOT_W / 2, y: HEIGHT - 12, "text-anchor": "middle",
  }, esc(title)));
  return parts.join("");
}

function xAxisCategorical(names: string[], title: string): string {
  const y0 = MARGIN.top + PLOT_H;
  const slot = PLOT_W / Math.max(names.length, 1);
  const parts: string[] = [];
  parts.push(el("line", {
    x1: MARGIN.left, y1: y0, x2: MARGIN.left + PLOT_W, y2: y0, stroke: "#222",
  }));
  names.forEach((name, i) => {
    const cx = px(MARGIN.left + slot * (i + 0.5));
    parts.push(el("line", { x1: cx, y1: y0, x2: cx, y2: y0 + 4, stroke: "#222" }));
    parts.push(el("text", {
      x: cx, y: y0 + 16, "text-anchor": "middle", class: "tick-label",
    }, esc(name)));
  });
  parts.push(el("text", {
    x: MARGIN.left + PLOT_W / 2, y: HEIGHT - 12, "text-anchor": "middle",
  }, esc(title)));
  return parts.join("");
}

function legend(names: string[], colorAt: (i: number) => string): string {
  const parts: string[] = [];
  names.forEach((name, i) => {
    const y = MARGIN.top + 6 + i * 16;
    const x = MARGIN.left + PLOT_W - 130;
    parts.push(el("rect", { x, y: y - 8, width: 10, height: 10, fill: colorAt(i) }));
    parts.push(el("text", { x: x + 15, y }, esc(name)));
  });
  return el("g", { class: "legend" }, parts);
}

function slotCenter(count: number, i: number): number {
  const slot = PLOT_W / Math.max(count, 1);
  return MARGIN.left + slot * (i + 0.5);
}

function missingMark(cx: number): string {
  return el("text", {
    x: px(cx), y: MARGIN.top + PLOT_H / 2, "text-anchor": "middle",
    fill: "#999", class: "missing-mark",
  }, "missing");
}

function renderBoxes(p: PerformancePayload): string {
  const boxes = p.boxes ?? [];
  const pool: (number | null)[] = [];
  for (const b of boxes) {
    pool.push(b.whisker_low, b.whisker_high, b.notch_low, b.notch_high, ...b.outliers);
  }
  const dom = extent(pool) ?? [0, 1];
  const y = linearScale(dom[0], dom[1], MARGIN.top + PLOT_H, MARGIN.top);
  const body: string[] = [];
  const half = Math.min(24, (PLOT_W / Math.max(boxes.length, 1)) * 0.28);
  boxes.forEach((b, i) => {
    const cx = slotCenter(boxes.length, i);
    const attrs: Record<string, string | number> = {
      class: "box",
      "data-planner": b.planner,
      "data-n": b.n,
      "data-n-missing": b.n_missing,
    };
    if (b.median === null || b.q1 === null || b.q3 === null ||
        b.whisker_low === null || b.whisker_high === null) {
      body.push(el("g", attrs, missingMark(cx)));
      return;
    }
    attrs["data-median"] = b.median;
    attrs["data-q1"] = b.q1;
    attrs["data-q3"] = b.q3;
    const parts: string[] = [];
    parts.push(el("line", {
      x1: px(cx), y1: px(y(b.whisker_low)), x2: px(cx), y2: px(y(b.q1)),
      stroke: "#444",
    }));
    parts.push(el("line", {
      x1: px(cx), y1: px(y(b.q3)), x2: px(cx), y2: px(y(b.whisker_high)),
      stroke: "#444",
    }));
    for (const w of [b.whisker_low, b.whisker_high]) {
      parts.push(el("line", {
        x1: px(cx - half * 0.6), y1: px(y(w)), x2: px(cx + half * 0.6), y2: px(y(w)),
        stroke: "#444",
      }));
    }
    parts.push(el("rect", {
      x: px(cx - half), y: px(y(b.q3)),
      width: px(half * 2), height: px(Math.max(y(b.q1) - y(b.q3), 0.5)),
      fill: PALETTE[i % PALETTE.length], "fill-opacity": 0.55, stroke: "#333",
    }));
    parts.push(el("line", {
      x1: px(cx - half), y1: px(y(b.median)), x2: px(cx + half), y2: px(y(b.median)),
      stroke: "#111", "stroke-width": 2, class: "median",
    }));
    if (b.notch_low !== null && b.notch_high !== null) {
      for (const nv of [b.notch_low, b.notch_high]) {
        parts.push(el("line", {
          x1: px(cx - half), y1: px(y(nv)), x2: px(cx + half), y2: px(y(nv)),
          stroke: "#111", "stroke-dasharray": "3 2", class: "notch",
        }));
      }
    }
    for (const o of b.outliers) {
      if (o !== null) {
        parts.push(el("circle", {
          cx: px(cx), cy: px(y(o)), r: 2.5,
          fill: "none", stroke: "#444", class: "outlier",
        }));
      }
    }
    body.push(el("g", attrs, parts));
  });
  body.push(yAxis(y, niceTicks(dom[0], dom[1]), p.labels.y));
  body.push(xAxisCategorical(boxes.map((b) => b.planner), p.labels.x));
  return frame(body);
}

function renderEcdf(p: PerformancePayload): string {
  const curves = p.curves ?? [];
  const xs: number[] = [];
  for (const c of curves) {
    for (const [xv] of c.points) {
      xs.push(xv);
    }
  }
  const dom = extent(xs) ?? [0, 1];
  const x = linearScale(dom[0], dom[1], MARGIN.left, MARGIN.left + PLOT_W);
  const y = linearScale(0, 1, MARGIN.top + PLOT_H, MARGIN.top);
  const body: string[] = [];
  curves.forEach((c, i) => {
    if (c.points.length === 0) {
      return;
    }
    let d = `M ${px(x(dom[0]))} ${px(y(0))}`;
    let lastF = 0;
    for (const [xv, f] of c.points) {
      d += ` H ${px(x(xv))} V ${px(y(f))}`;
      lastF = f;
    }
    d += ` H ${px(x(dom[1]))}`;
    body.push(el("path", {
      d, fill: "none", stroke: PALETTE[i % PALETTE.length], "stroke-width": 1.8,
      class: "ecdf",
      "data-planner": c.planner,
      "data-points": c.points.length,
      "data-final": lastF,
    }));
  });
  body.push(yAxis(y, niceTicks(0, 1), p.labels.y));
  body.push(xAxisNumeric(x, niceTicks(dom[0], dom[1]), p.labels.x));
  body.push(legend(curves.map((c) => c.planner), (i) => PALETTE[i % PALETTE.length]));
  return frame(body);
}

function renderFractions(p: PerformancePayload): string {
  const fractions = p.fractions ?? [];
  const y = linearScale(0, 1, MARGIN.top + PLOT_H, MARGIN.top);
  const body: string[] = [];
  const half = Math.min(26, (PLOT_W / Math.max(fractions.length, 1)) * 0.3);
  fractions.forEach((f, i) => {
    const cx = slotCenter(fractions.length, i);
    const attrs: Record<string, string | number> = {
      class: "fraction",
      "data-planner": f.planner,
      "data-n": f.n,
    };
    if (f.fraction === null) {
      body.push(el("g", attrs, missingMark(cx)));
      return;
    }
    attrs["data-fraction"] = f.fraction;
    if (f.ci_low !== null) {
      attrs["data-ci-low"] = f.ci_low;
    }
    if (f.ci_high !== null) {
      attrs["data-ci-high"] = f.ci_high;
    }
    const parts: string[] = [];
    parts.push(el("rect", {
      x: px(cx - half), y: px(y(f.fraction)),
      width: px(half * 2), height: px(Math.max(y(0) - y(f.fraction), 0)),
      fill: PALETTE[i % PALETTE.length], "fill-opacity": 0.7, stroke: "#333",
      class: "bar",
    }));
    if (f.ci_low !== null && f.ci_high !== null) {
      parts.push(el("line", {
        x1: px(cx), y1: px(y(f.ci_low)), x2: px(cx), y2: px(y(f.ci_high)),
        stroke: "#111", class: "ci",
      }));
      for (const c of [f.ci_low, f.ci_high]) {
        parts.push(el("line", {
          x1: px(cx - half * 0.4), y1: px(y(c)), x2: px(cx + half * 0.4), y2: px(y(c)),
          stroke: "#111",
        }));
      }
    }
    body.push(el("g", attrs, parts));
  });
  body.push(yAxis(y, niceTicks(0, 1), p.labels.y));
  body.push(xAxisCategorical(fractions.map((f) => f.planner), p.labels.x));
  return frame(body);
}

export function renderPerformance(p: PerformancePayload): string {
  if (p.mode === "ecdf") {
    return renderEcdf(p);
  }
  if (p.mode === "success") {
    return renderFractions(p);
  }
  return renderBoxes(p);
}

function bandPath(
  grid: number[],
  lo: (number | null)[],
  hi: (number | null)[],
  x: (v: number) => number,
  y: (v: number) => number,
): string[] {
  const out: string[] = [];
  for (const [a, b] of segments([lo, hi])) {
    if (b - a < 2) {
      continue;
    }
    const fwd = [];
    const back = [];
    for (let i = a; i < b; i++) {
      fwd.push(`${px(x(grid[i]))} ${px(y(hi[i] as number))}`);
      back.push(`${px(x(grid[i]))} ${px(y(lo[i] as number))}`);
    }
    back.reverse();
    out.push(`M ${fwd.join(" L ")} L ${back.join(" L ")} Z`);
  }
  return out;
}

export function renderProgress(p: ProgressPayload): string {
  const pool: (number | null)[] = [];
  for (const a of p.aggregates) {
    pool.push(...a.mean, ...a.ci_low, ...a.ci_high);
  }
  for (const set of p.points ?? []) {
    for (const [, v] of set.points) {
      pool.push(v);
    }
  }
  const dom = extent(pool) ?? [0, 1];
  const x = linearScale(0, p.time_limit, MARGIN.left, MARGIN.left + PLOT_W);
  const y = linearScale(dom[0], dom[1], MARGIN.top + PLOT_H, MARGIN.top);
  const body: string[] = [];
  const colorOf = new Map(p.aggregates.map((a, i) => [a.planner, PALETTE[i % PALETTE.length]]));
  for (const set of p.points ?? []) {
    const color = colorOf.get(set.planner) ?? "#888";
    const dots = set.points.map(([t, v]) =>
      el("circle", { cx: px(x(t)), cy: px(y(v)), r: 2, fill: color, class: "pt" }),
    );
    body.push(el("g", { class: "points", "data-planner": set.planner, opacity: 0.35 }, dots));
  }
  p.aggregates.forEach((a, i) => {
    const color = PALETTE[i % PALETTE.length];
    const parts: string[] = [];
    for (const d of bandPath(a.grid, a.ci_low, a.ci_high, x, y)) {
      parts.push(el("path", { d, fill: color, "fill-opacity": 0.18, stroke: "none", class: "band" }));
    }
    for (const [s, e] of segments([a.mean])) {
      const pts = [];
      for (let k = s; k < e; k++) {
        pts.push(`${px(x(a.grid[k]))} ${px(y(a.mean[k] as number))}`);
      }
      parts.push(el("path", {
        d: `M ${pts.join(" L ")}`, fill: "none", stroke: color, "stroke-width": 1.8,
        class: "mean",
      }));
    }
    body.push(el("g", {
      class: "series", "data-planner": a.planner, "data-n-runs": a.n_runs,
    }, parts));
  });
  body.push(yAxis(y, niceTicks(dom[0], dom[1]), p.labels.y));
  body.push(xAxisNumeric(x, niceTicks(0, p.time_limit), p.labels.x));
  body.push(legend(p.aggregates.map((a) => a.planner), (i) => PALETTE[i % PALETTE.length]));
  return frame(body);
}

export function renderRegression(p: RegressionPayload): string {
  const pool: (number | null)[] = [0];
  for (const b of p.bars) {
    pool.push(b.mean, b.mean + (b.stderr ?? 0), b.mean - (b.stderr ?? 0));
  }
  const dom = extent(pool) ?? [0, 1];
  const y = linearScale(dom[0], dom[1], MARGIN.top + PLOT_H, MARGIN.top);
  const groups = p.versions;
  const series = p.planners;
  const slot = PLOT_W / Math.max(groups.length, 1);
  const barW = Math.min(22, (slot * 0.8) / Math.max(series.length, 1));
  const body: string[] = [];
  for (const bar of p.bars) {
    const gi = groups.indexOf(bar.version);
    const si = series.indexOf(bar.planner);
    if (gi < 0 || si < 0) {
      continue;
    }
    const cx = slotCenter(groups.length, gi) +
      (si - (series.length - 1) / 2) * barW;
    const attrs: Record<string, string | number> = {
      class: "bar",
      "data-planner": bar.planner,
      "data-version": bar.version,
      "data-mean": bar.mean,
      "data-n": bar.n,
    };
    if (bar.stderr !== null) {
      attrs["data-stderr"] = bar.stderr;
    }
    const top = Math.min(y(bar.mean), y(0));
    const h = Math.abs(y(0) - y(bar.mean));
    const parts: string[] = [];
    parts.push(el("rect", {
      x: px(cx - barW / 2 + 1), y: px(top), width: px(barW - 2), height: px(Math.max(h, 0.5)),
      fill: PALETTE[si % PALETTE.length], "fill-opacity": 0.75, stroke: "#333",
    }));
    if (bar.stderr !== null) {
      parts.push(el("line", {
        x1: px(cx), y1: px(y(bar.mean - bar.stderr)), x2: px(cx), y2: px(y(bar.mean + bar.stderr)),
        stroke: "#111", class: "stderr",
      }));
    }
    body.push(el("g", attrs, parts));
  }
  body.push(yAxis(y, niceTicks(dom[0], dom[1]), p.labels.y));
  body.push(xAxisCategorical(groups, p.labels.x));
  body.push(legend(series, (i) => PALETTE[i % PALETTE.length]));
  return frame(body);
}

export function missingTable(rows: MissingRow[]): string {
  if (rows.length === 0) {
    return "";
  }
  const body = rows
    .map((r) =>
      `<tr><td>${esc(r.planner)}</td><td>${r.total}</td><td>${r.missing}</td></tr>`,
    )
    .join("");
  return (
    `<table class="missing"><caption>data points</caption>` +
    `<thead><tr><th>planner</th><th>runs</th><th>missing</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function countsTable(aggregates: AggregateData[]): string {
  const width = Math.max(0, ...aggregates.map((a) => a.counts_1s.length));
  if (width === 0) {
    return "";
  }
  const head = Array.from({ length: width }, (_, i) => `<th>${i}&#8211;${i + 1}s</th>`).join("");
  const body = aggregates
    .map((a) => {
      const cells = Array.from({ length: width }, (_, i) => `<td>${a.counts_1s[i] ?? 0}</td>`).join("");
      return `<tr><td>${esc(a.planner)}</td>${cells}</tr>`;
    })
    .join("");
  return (
    `<table class="counts"><caption>progress samples per second</caption>` +
    `<thead><tr><th>planner</th>${head}</tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}
