/** Page state and wiring. All numbers shown come from API payloads; the
 * client only draws them. At most one plot request is in flight and the
 * latest selection always wins. */

import {
  ENTITIES_PATH,
  UPLOAD_PATH,
  decodeJson,
  fetchBytes,
  plotPath,
  type Fetched,
  type FetchLike,
  type PlotKind,
  type PlotQuery,
} from "./api.js";
import { countsTable, missingTable, renderPerformance, renderProgress, renderRegression } from "./draw.js";
import type {
  Entities,
  ErrorPayload,
  PerformancePayload,
  PlotPayload,
  ProgressPayload,
  RegressionPayload,
  UploadResult,
} from "./types.js";

export type Page = PlotKind | "upload";

export interface Selection {
  page: Page;
  problem: string;
  version: string;
  perfAttribute: string;
  progressAttribute: string;
  regressionAttribute: string;
  planners: string[];
  ecdf: boolean;
  showPoints: boolean;
  smoothWindow: number;
}

export type SaveFn = (filename: string, bytes: Uint8Array, mime: string) => void;

const PAGES: Page[] = ["performance", "progress", "regression", "upload"];
const PLOTTABLE = new Set(["INTEGER", "REAL", "BOOLEAN", "ENUM"]);
const NO_DATA_HTML =
  '<p class="nodata">no data in the database yet;' +
  " upload a benchmark log to get started</p>";

const SHELL = `
<header>
  <h1>plannerbench</h1>
  <nav id="nav"></nav>
</header>
<main>
  <div id="controls" class="controls"></div>
  <div id="error" class="error" hidden></div>
  <section id="plot-page">
    <figure id="plot"></figure>
    <div class="downloads">
      <button id="dl-svg" type="button" disabled>download SVG</button>
      <button id="dl-json" type="button" disabled>download JSON</button>
    </div>
    <div id="tables"></div>
  </section>
  <section id="upload-page" hidden>
    <p>Add runs to the database by uploading a benchmark log file.</p>
    <input type="file" id="file"/>
    <button id="do-upload" type="button">upload</button>
    <div id="upload-result"></div>
  </section>
</main>
`;

function errorText(res: Fetched): string {
  try {
    return decodeJson<ErrorPayload>(res.bytes).error;
  } catch {
    return `HTTP ${res.status}`;
  }
}

function readFileBytes(file: File): Promise<Uint8Array> {
  if (typeof file.arrayBuffer === "function") {
    return file.arrayBuffer().then((buf) => new Uint8Array(buf));
  }
  // older engines only expose FileReader
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(new Uint8Array(reader.result as ArrayBuffer));
    reader.onerror = () => reject(reader.error);
    reader.readAsArrayBuffer(file);
  });
}

function domSave(filename: string, bytes: Uint8Array, mime: string): void {
  const blob = new Blob([bytes as unknown as BlobPart], { type: mime });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}

export class App {
  readonly sel: Selection = {
    page: "performance",
    problem: "",
    version: "ALL",
    perfAttribute: "",
    progressAttribute: "",
    regressionAttribute: "",
    planners: [],
    ecdf: false,
    showPoints: false,
    smoothWindow: 5,
  };

  private entities: Entities | null = null;
  private seq = 0;
  private inflight: AbortController | null = null;
  private pending: Promise<void> = Promise.resolve();
  private plotted: { kind: PlotKind; query: PlotQuery } | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly fetchFn: FetchLike,
    private readonly save: SaveFn = domSave,
  ) {
    root.innerHTML = SHELL;
    const nav = this.q("#nav");
    for (const page of PAGES) {
      const b = document.createElement("button");
      b.type = "button";
      b.dataset.page = page;
      b.textContent = page;
      b.addEventListener("click", () => this.setPage(page));
      nav.append(b);
    }
    this.q<HTMLButtonElement>("#dl-svg").addEventListener("click", () => {
      this.track(this.download("svg"));
    });
    this.q<HTMLButtonElement>("#dl-json").addEventListener("click", () => {
      this.track(this.download("json"));
    });
    this.q<HTMLButtonElement>("#do-upload").addEventListener("click", () => {
      this.track(this.uploadSelected());
    });
  }

  start(): void {
    this.track(this.init());
  }

  /** Wait until every scheduled fetch chain has finished. */
  async settle(): Promise<void> {
    let seen: Promise<void>;
    do {
      seen = this.pending;
      await seen;
    } while (seen !== this.pending);
  }

  private q<T extends HTMLElement = HTMLElement>(selector: string): T {
    const node = this.root.querySelector(selector);
    if (!node) {
      throw new Error(`missing element ${selector}`);
    }
    return node as T;
  }

  private track(work: Promise<void>): void {
    this.pending = this.pending.then(() => work).catch(() => undefined);
  }

  private async init(): Promise<void> {
    await this.loadEntities();
    this.setPage(this.sel.page);
  }

  private async loadEntities(): Promise<void> {
    let res: Fetched;
    try {
      res = await fetchBytes(this.fetchFn, ENTITIES_PATH);
    } catch (err) {
      this.showError(String(err));
      return;
    }
    if (!res.ok) {
      this.showError(errorText(res));
      return;
    }
    this.applyEntities(decodeJson<Entities>(res.bytes));
  }

  private runAttrChoices(): string[] {
    return (this.entities?.run_attributes ?? [])
      .filter((a) => PLOTTABLE.has(a.type))
      .map((a) => a.name);
  }

  private progressAttrChoices(): string[] {
    return (this.entities?.progress_attributes ?? [])
      .filter((a) => a.name !== "time" && PLOTTABLE.has(a.type))
      .map((a) => a.name);
  }

  private applyEntities(ent: Entities): void {
    this.entities = ent;
    const s = this.sel;
    if (!ent.problems.includes(s.problem)) {
      s.problem = ent.problems[0] ?? "";
    }
    if (s.version !== "ALL" && !ent.versions.includes(s.version)) {
      s.version = "ALL";
    }
    const runAttrs = this.runAttrChoices();
    const pick = (current: string, preferred: string): string => {
      if (runAttrs.includes(current)) {
        return current;
      }
      return runAttrs.includes(preferred) ? preferred : runAttrs[0] ?? "";
    };
    s.perfAttribute = pick(s.perfAttribute, "time");
    s.regressionAttribute = pick(s.regressionAttribute, "time");
    const progAttrs = this.progressAttrChoices();
    if (!progAttrs.includes(s.progressAttribute)) {
      s.progressAttribute = progAttrs.includes("best_cost")
        ? "best_cost"
        : progAttrs[0] ?? "";
    }
    s.planners = s.planners.filter((p) => ent.planners.includes(p));
    this.renderControls();
  }

  setPage(page: Page): void {
    this.sel.page = page;
    for (const b of this.root.querySelectorAll<HTMLButtonElement>("#nav button")) {
      if (b.dataset.page === page) {
        b.setAttribute("aria-current", "page");
      } else {
        b.removeAttribute("aria-current");
      }
    }
    this.q("#upload-page").hidden = page !== "upload";
    this.q("#plot-page").hidden = page === "upload";
    this.renderControls();
    if (page !== "upload") {
      this.schedule();
    }
  }

  /** Apply a selection change and refetch the current plot once. */
  update(mutate: (sel: Selection) => void): void {
    mutate(this.sel);
    this.schedule();
  }

  private schedule(): void {
    if (this.sel.page === "upload") {
      return;
    }
    if (!this.entities || this.entities.problems.length === 0) {
      this.q("#plot").innerHTML = NO_DATA_HTML;
      this.q("#tables").textContent = "";
      this.setDownloads(false);
      return;
    }
    const token = ++this.seq;
    this.inflight?.abort();
    const ctl = new AbortController();
    this.inflight = ctl;
    this.track(this.refreshOnce(token, ctl));
  }

  private query(): PlotQuery {
    const s = this.sel;
    const attribute =
      s.page === "progress"
        ? s.progressAttribute
        : s.page === "regression"
          ? s.regressionAttribute
          : s.perfAttribute;
    return {
      problem: s.problem,
      attribute,
      version: s.version,
      planners: [...s.planners],
      ecdf: s.ecdf,
      showPoints: s.showPoints,
      smoothWindow: s.smoothWindow,
    };
  }

  private async refreshOnce(token: number, ctl: AbortController): Promise<void> {
    const kind = this.sel.page as PlotKind;
    const query = this.query();
    let res: Fetched;
    try {
      res = await fetchBytes(this.fetchFn, plotPath(kind, query), { signal: ctl.signal });
    } catch (err) {
      if ((err as { name?: string }).name === "AbortError") {
        return;
      }
      if (token === this.seq) {
        this.showError(String(err));
      }
      return;
    }
    if (token !== this.seq) {
      return;
    }
    if (!res.ok) {
      this.showError(errorText(res));
      return;
    }
    this.showPlot(kind, query, decodeJson<PlotPayload>(res.bytes));
  }

  private showError(message: string): void {
    const box = this.q("#error");
    box.textContent = message;
    box.hidden = false;
    this.q("#plot").textContent = "";
    this.q("#tables").textContent = "";
    this.plotted = null;
    this.setDownloads(false);
  }

  private showPlot(kind: PlotKind, query: PlotQuery, payload: PlotPayload): void {
    this.q("#error").hidden = true;
    let svg: string;
    let tables: string;
    if (payload.kind === "progress") {
      svg = renderProgress(payload as ProgressPayload);
      tables = missingTable(payload.missing) + countsTable(payload.aggregates);
    } else if (payload.kind === "regression") {
      svg = renderRegression(payload as RegressionPayload);
      tables = missingTable(payload.missing);
    } else {
      svg = renderPerformance(payload as PerformancePayload);
      tables = missingTable(payload.missing);
    }
    this.q("#plot").innerHTML = svg;
    this.q("#tables").innerHTML = tables;
    this.plotted = { kind, query };
    this.setDownloads(true);
  }

  private setDownloads(enabled: boolean): void {
    this.q<HTMLButtonElement>("#dl-svg").disabled = !enabled;
    this.q<HTMLButtonElement>("#dl-json").disabled = !enabled;
  }

  /** Save the backend bytes for the plot on screen, unmodified. */
  async download(format: "svg" | "json"): Promise<void> {
    const snap = this.plotted;
    if (!snap) {
      return;
    }
    const url =
      format === "svg" ? plotPath(snap.kind, snap.query, "svg") : plotPath(snap.kind, snap.query);
    let res: Fetched;
    try {
      res = await fetchBytes(this.fetchFn, url);
    } catch (err) {
      this.showError(String(err));
      return;
    }
    if (!res.ok) {
      this.showError(errorText(res));
      return;
    }
    const name = `${snap.kind}_${snap.query.problem}_${snap.query.attribute}.${format}`;
    this.save(name, res.bytes, format === "svg" ? "image/svg+xml" : "application/json");
  }

  private async uploadSelected(): Promise<void> {
    const input = this.q<HTMLInputElement>("#file");
    const out = this.q("#upload-result");
    const file = input.files && input.files[0];
    if (!file) {
      out.textContent = "choose a log file first";
      return;
    }
    let res: Fetched;
    try {
      const body = await readFileBytes(file);
      res = await fetchBytes(this.fetchFn, UPLOAD_PATH, {
        method: "POST",
        body,
        headers: { "content-type": "application/octet-stream" },
      });
    } catch (err) {
      out.textContent = String(err);
      return;
    }
    if (!res.ok) {
      out.textContent = errorText(res);
      return;
    }
    const result = decodeJson<UploadResult>(res.bytes);
    out.textContent = `added as experiment ${result.experiment_id}`;
    await this.loadEntities();
  }

  private label(text: string, control: HTMLElement, inline = false): HTMLLabelElement {
    const wrap = document.createElement("label");
    if (inline) {
      wrap.className = "inline";
    }
    const span = document.createElement("span");
    span.textContent = text;
    wrap.append(span, control);
    return wrap;
  }

  private select(
    id: string,
    choices: string[],
    current: string,
    onChange: (value: string) => void,
  ): HTMLSelectElement {
    const sel = document.createElement("select");
    sel.id = id;
    for (const choice of choices) {
      sel.add(new Option(choice, choice, false, choice === current));
    }
    sel.addEventListener("change", () => onChange(sel.value));
    return sel;
  }

  private checkbox(id: string, checked: boolean, onChange: (on: boolean) => void): HTMLInputElement {
    const box = document.createElement("input");
    box.type = "checkbox";
    box.id = id;
    box.checked = checked;
    box.addEventListener("change", () => onChange(box.checked));
    return box;
  }

  private renderControls(): void {
    const box = this.q("#controls");
    box.textContent = "";
    const ent = this.entities;
    const page = this.sel.page;
    if (!ent || ent.problems.length === 0 || page === "upload") {
      return;
    }
    const s = this.sel;
    box.append(
      this.label(
        "problem",
        this.select("sel-problem", ent.problems, s.problem, (v) =>
          this.update((sel) => {
            sel.problem = v;
          }),
        ),
      ),
    );
    const attrChoices = page === "progress" ? this.progressAttrChoices() : this.runAttrChoices();
    const current =
      page === "progress"
        ? s.progressAttribute
        : page === "regression"
          ? s.regressionAttribute
          : s.perfAttribute;
    box.append(
      this.label(
        "attribute",
        this.select("sel-attribute", attrChoices, current, (v) =>
          this.update((sel) => {
            if (page === "progress") {
              sel.progressAttribute = v;
            } else if (page === "regression") {
              sel.regressionAttribute = v;
            } else {
              sel.perfAttribute = v;
            }
          }),
        ),
      ),
    );
    if (page !== "regression") {
      box.append(
        this.label(
          "version",
          this.select("sel-version", ["ALL", ...ent.versions], s.version, (v) =>
            this.update((sel) => {
              sel.version = v;
            }),
          ),
        ),
      );
    }
    const multi = document.createElement("select");
    multi.multiple = true;
    multi.id = "sel-planners";
    multi.size = Math.min(Math.max(ent.planners.length, 2), 6);
    for (const p of ent.planners) {
      multi.add(new Option(p, p, false, s.planners.length === 0 || s.planners.includes(p)));
    }
    multi.addEventListener("change", () => {
      const chosen = Array.from(multi.selectedOptions).map((o) => o.value);
      this.update((sel) => {
        sel.planners = chosen.length === ent.planners.length ? [] : chosen;
      });
    });
    box.append(this.label("planners", multi));
    if (page === "performance") {
      box.append(
        this.label(
          "ECDF",
          this.checkbox("opt-ecdf", s.ecdf, (on) =>
            this.update((sel) => {
              sel.ecdf = on;
            }),
          ),
          true,
        ),
      );
    }
    if (page === "progress") {
      box.append(
        this.label(
          "show points",
          this.checkbox("opt-points", s.showPoints, (on) =>
            this.update((sel) => {
              sel.showPoints = on;
            }),
          ),
          true,
        ),
      );
      const smooth = document.createElement("input");
      smooth.type = "number";
      smooth.id = "opt-smooth";
      smooth.min = "0";
      smooth.step = "1";
      smooth.value = String(s.smoothWindow);
      smooth.addEventListener("change", () => {
        const v = Number(smooth.value);
        if (Number.isInteger(v) && v >= 0) {
          this.update((sel) => {
            sel.smoothWindow = v;
          });
        } else {
          smooth.value = String(this.sel.smoothWindow);
        }
      });
      box.append(this.label("smoothing window", smooth, true));
    }
  }
}

export function createApp(root: HTMLElement, fetchFn: FetchLike, save?: SaveFn): App {
  const app = new App(root, fetchFn, save);
  app.start();
  return app;
}
