import { ApiError, getExplanation, getPredictions, getScenario } from "./api.js";
import type { FetchLike } from "./api.js";
import {
  ALERT_ID,
  ASSERTIVE_ID,
  STATUS_ID,
  announceAssertive,
  announcePolite,
  clearAlert,
  showAlert,
} from "./announce.js";
import { playAllTones, playTone } from "./audio.js";
import type { ToneContext } from "./audio.js";
import {
  ExplanationCache,
  RequestSequencer,
  initialState,
  stepFocus,
  withExplanation,
  withMethodSelected,
  withPredictions,
  withRowSelected,
} from "./state.js";
import type { UiState } from "./state.js";
import type {
  ChartSpec,
  Explanation,
  ExplanationDetail,
  MethodValue,
  PredictionRow,
  Scenario,
} from "./types.js";

export interface AppOptions {
  fetchImpl?: FetchLike;
  /** Lazy factory so no AudioContext is created before the first tone. */
  audioContext?: () => ToneContext;
}

const SVG_NS = "http://www.w3.org/2000/svg";

// column order mirrors the served prediction row fields
const COLUMN_HEADERS = ["Select", "Predicted flow", "City", "Detector", "Speed", "Occupancy"];

function el(
  doc: Document,
  tag: string,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElement {
  const node = doc.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    node.setAttribute(name, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export class AppController {
  state: UiState = initialState();

  private readonly cache = new ExplanationCache();
  private readonly sequencer = new RequestSequencer();
  private context: ToneContext | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly fetchImpl: FetchLike,
    private readonly contextFactory: (() => ToneContext) | null,
  ) {}

  async start(): Promise<void> {
    const doc = this.root.ownerDocument;
    this.root.innerHTML = "";
    this.root.append(
      el(doc, "h1", {}, "Traffic flow predictions"),
      el(doc, "div", { id: ALERT_ID, role: "alert", class: "alert" }),
      el(doc, "div", {
        id: ASSERTIVE_ID,
        role: "log",
        "aria-live": "assertive",
        class: "visually-hidden",
      }),
      el(doc, "div", {
        id: STATUS_ID,
        role: "status",
        "aria-live": "polite",
        class: "visually-hidden",
      }),
    );

    let scenario: Scenario;
    try {
      scenario = await getScenario(this.fetchImpl);
    } catch (err) {
      this.showError(err);
      return;
    }

    const persona = el(doc, "p", { class: "persona" }, scenario.persona.description);

    const button = el(doc, "button", { id: "load-button", type: "button" }, scenario.button_label);
    button.addEventListener("click", () => {
      void this.loadPredictions();
    });

    const predictions = el(doc, "section", { id: "predictions", "aria-label": "Predictions" });

    const methods = el(doc, "fieldset", { id: "methods" });
    methods.append(el(doc, "legend", {}, "Explanation method"));
    for (const option of scenario.methods) {
      const label = el(doc, "label", { class: "method" });
      const input = el(doc, "input", {
        type: "radio",
        name: "method",
        value: option.value,
      }) as HTMLInputElement;
      input.addEventListener("change", () => {
        this.onMethodChosen(option.value);
      });
      // a click on an already-checked radio fires no change event, so this
      // is the re-announce path; on first selection the state check fails
      // because change has not run yet
      input.addEventListener("click", () => {
        if (input.checked && this.state.selectedMethod === option.value) {
          this.onMethodChosen(option.value);
        }
      });
      label.append(input, doc.createTextNode(` ${option.label}`));
      methods.append(label);
    }

    const explanation = el(doc, "section", { id: "explanation" });

    this.root.append(persona, button, predictions, methods, explanation);
  }

  private async loadPredictions(): Promise<void> {
    let rows: PredictionRow[];
    try {
      rows = await getPredictions(this.fetchImpl);
    } catch (err) {
      this.showError(err);
      return;
    }
    clearAlert(this.root);
    this.state = withPredictions(this.state, rows);
    this.clearExplanation();
    this.renderPredictions(rows);
    if (rows.length === 0) {
      announcePolite(this.root, "No rows available.");
    } else {
      announcePolite(this.root, "Prediction table loaded.");
    }
  }

  private renderPredictions(rows: PredictionRow[]): void {
    const doc = this.root.ownerDocument;
    const host = this.root.querySelector<HTMLElement>("#predictions");
    if (!host) return;
    host.innerHTML = "";
    if (rows.length === 0) {
      host.append(el(doc, "p", {}, "No rows available."));
      return;
    }

    const table = el(doc, "table", {});
    table.append(el(doc, "caption", {}, "Predicted traffic flow by detector"));
    const thead = el(doc, "thead", {});
    const headRow = el(doc, "tr", {});
    for (const header of COLUMN_HEADERS) {
      headRow.append(el(doc, "th", { scope: "col" }, header));
    }
    thead.append(headRow);
    table.append(thead);

    const tbody = el(doc, "tbody", {});
    for (const row of rows) {
      const tr = el(doc, "tr", {});
      const selectCell = el(doc, "th", { scope: "row" });
      const radio = el(doc, "input", {
        type: "radio",
        name: "row",
        value: String(row.row_id),
        "aria-label": `Select detector ${row.detector} in ${row.city}`,
      }) as HTMLInputElement;
      radio.addEventListener("change", () => {
        this.onRowChosen(row.row_id);
      });
      selectCell.append(radio);
      tr.append(selectCell);
      // numeric cells show the served values verbatim
      tr.append(el(doc, "td", {}, String(row.pred_flow)));
      tr.append(el(doc, "td", {}, row.city));
      tr.append(el(doc, "td", {}, row.detector));
      tr.append(el(doc, "td", {}, String(row.speed)));
      tr.append(el(doc, "td", {}, String(row.occupancy)));
      tbody.append(tr);
    }
    table.append(tbody);
    host.append(table);
  }

  private onRowChosen(rowId: number): void {
    this.state = withRowSelected(this.state, rowId);
    this.clearExplanation();
    const method = this.state.selectedMethod;
    if (method !== null) {
      void this.requestExplanation(rowId, method);
    }
  }

  private onMethodChosen(method: MethodValue): void {
    const rowId = this.state.selectedRow;
    if (rowId === null) {
      announcePolite(this.root, "Select a row before choosing an explanation method.");
      return;
    }
    this.state = withMethodSelected(this.state, method);
    void this.requestExplanation(rowId, method);
  }

  private async requestExplanation(rowId: number, method: MethodValue): Promise<void> {
    const cached = this.cache.get(rowId, method);
    if (cached) {
      this.applyExplanation(cached);
      return;
    }
    const token = this.sequencer.next();
    let explanation: Explanation;
    try {
      explanation = await getExplanation(this.fetchImpl, rowId, method);
    } catch (err) {
      if (this.sequencer.isCurrent(token)) {
        this.showError(err);
      }
      return;
    }
    if (!this.sequencer.isCurrent(token)) {
      return; // superseded selection; drop the stale response
    }
    this.cache.set(rowId, method, explanation);
    this.applyExplanation(explanation);
  }

  private applyExplanation(explanation: Explanation): void {
    clearAlert(this.root);
    this.state = withExplanation(this.state, explanation);
    this.renderExplanation(explanation);
    announceAssertive(this.root, explanation.summary_text);
  }

  private clearExplanation(): void {
    const region = this.root.querySelector<HTMLElement>("#explanation");
    if (!region) return;
    region.innerHTML = "";
    region.removeAttribute("role");
    region.removeAttribute("aria-label");
  }

  private renderExplanation(explanation: Explanation): void {
    const doc = this.root.ownerDocument;
    const region = this.root.querySelector<HTMLElement>("#explanation");
    if (!region) return;
    region.innerHTML = "";
    region.setAttribute("role", explanation.aria.role);
    region.setAttribute("aria-label", explanation.aria.label);

    for (const key of explanation.aria.reading_order) {
      const section = el(doc, "section", { "data-section": key });
      section.append(el(doc, "h2", {}, explanation.aria.section_labels[key] ?? key));
      switch (key) {
        case "summary":
          section.append(el(doc, "p", {}, explanation.summary_text));
          break;
        case "ranked_items":
          section.append(this.buildRankedList(explanation));
          break;
        case "positive_group":
          section.append(buildNameList(doc, explanation.detail?.groups?.positive ?? []));
          break;
        case "negative_group":
          section.append(buildNameList(doc, explanation.detail?.groups?.negative ?? []));
          break;
        case "detail":
          section.append(buildDetail(doc, explanation.detail));
          break;
        case "running_sums":
          section.append(buildRunningSums(doc, explanation.detail?.running_sums ?? []));
          break;
        case "sonification":
          section.append(this.buildSonification(doc, explanation));
          break;
        case "chart":
          section.append(buildChart(doc, explanation.chart_spec));
          break;
        default:
          break;
      }
      region.append(section);
    }
  }

  private buildRankedList(explanation: Explanation): HTMLElement {
    const doc = this.root.ownerDocument;
    const list = el(doc, "ul", { class: "ranked" });
    explanation.aria.item_descriptions.forEach((text, index) => {
      list.append(el(doc, "li", { id: `ranked-item-${index}` }, text));
    });
    if (explanation.method === "shap-detailed") {
      // the stepping widget: one tab stop, arrows move the active point
      list.tabIndex = 0;
      list.setAttribute(
        "aria-label",
        explanation.aria.section_labels["ranked_items"] ?? "Ranked items",
      );
      list.setAttribute("aria-activedescendant", "ranked-item-0");
      list.addEventListener("keydown", (event) => {
        this.onStepKey(event, explanation);
      });
      list.addEventListener("focus", () => {
        this.focusItem(explanation, this.state.focusIndex);
      });
    }
    return list;
  }

  private onStepKey(event: KeyboardEvent, explanation: Explanation): void {
    const direction = event.key === "ArrowDown" ? 1 : event.key === "ArrowUp" ? -1 : 0;
    if (direction === 0) return;
    event.preventDefault();
    const result = stepFocus(this.state, direction as 1 | -1);
    if (result.atBoundary) {
      announceAssertive(this.root, "End of list.");
      return;
    }
    this.state = result.state;
    this.focusItem(explanation, this.state.focusIndex);
  }

  private focusItem(explanation: Explanation, index: number): void {
    const list = this.root.querySelector<HTMLElement>("#explanation ul.ranked");
    if (list) {
      list.setAttribute("aria-activedescendant", `ranked-item-${index}`);
      list.querySelectorAll("li").forEach((item, i) => {
        item.classList.toggle("focused", i === index);
      });
    }
    const text = explanation.aria.item_descriptions[index];
    if (text !== undefined) {
      announceAssertive(this.root, text);
    }
    const tone = explanation.sonification?.tones[index];
    if (tone) {
      const context = this.toneContext();
      if (context) {
        playTone(context, tone);
      }
    }
  }

  private buildSonification(doc: Document, explanation: Explanation): HTMLElement {
    const wrap = el(doc, "div", {});
    const button = el(doc, "button", { type: "button" }, "Play audio encoding");
    button.addEventListener("click", () => {
      const tones = explanation.sonification?.tones ?? [];
      const context = this.toneContext();
      if (context) {
        playAllTones(context, tones);
      }
    });
    wrap.append(button);
    return wrap;
  }

  private toneContext(): ToneContext | null {
    if (!this.contextFactory) return null;
    this.context ??= this.contextFactory();
    return this.context;
  }

  private showError(err: unknown): void {
    const text =
      err instanceof ApiError ? `Request failed: ${err.detail}` : `Request failed: ${String(err)}`;
    showAlert(this.root, text);
  }
}

function buildNameList(doc: Document, names: readonly string[]): HTMLElement {
  const list = el(doc, "ul", {});
  for (const name of names) {
    list.append(el(doc, "li", {}, name));
  }
  return list;
}

function buildDetail(doc: Document, detail: ExplanationDetail | undefined): HTMLElement {
  const dl = el(doc, "dl", {});
  if (!detail) return dl;
  dl.append(el(doc, "dt", {}, "Baseline or intercept"));
  dl.append(el(doc, "dd", {}, String(detail.base_or_intercept)));
  if (detail.fidelity !== undefined) {
    dl.append(el(doc, "dt", {}, "Fidelity"));
    dl.append(el(doc, "dd", {}, String(detail.fidelity)));
  }
  return dl;
}

function buildRunningSums(doc: Document, sums: readonly number[]): HTMLElement {
  const list = el(doc, "ol", {});
  for (const value of sums) {
    list.append(el(doc, "li", {}, String(value)));
  }
  return list;
}

/** Draw the served chart spec as inline SVG using only served colors. */
function buildChart(doc: Document, spec: ChartSpec): SVGSVGElement {
  const width = 480;
  const rowHeight = 28;
  const entries = spec.kind === "bar" ? (spec.bars ?? []) : (spec.points ?? []);
  const height = entries.length * rowHeight + 20;

  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("role", "img");
  svg.setAttribute("aria-label", spec.title);

  const background = doc.createElementNS(SVG_NS, "rect");
  background.setAttribute("x", "0");
  background.setAttribute("y", "0");
  background.setAttribute("width", String(width));
  background.setAttribute("height", String(height));
  background.setAttribute("fill", spec.background);
  svg.append(background);

  if (spec.kind === "bar") {
    const bars = spec.bars ?? [];
    const extent = Math.max(1e-9, ...bars.map((bar) => Math.abs(bar.value)));
    const scale = (width / 2 - 10) / extent;
    const center = width / 2;
    const axis = doc.createElementNS(SVG_NS, "line");
    axis.setAttribute("x1", String(center));
    axis.setAttribute("x2", String(center));
    axis.setAttribute("y1", "0");
    axis.setAttribute("y2", String(height));
    axis.setAttribute("stroke", spec.axis_color);
    svg.append(axis);
    bars.forEach((bar, index) => {
      const magnitude = Math.abs(bar.value) * scale;
      const rect = doc.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(bar.value < 0 ? center - magnitude : center));
      rect.setAttribute("y", String(index * rowHeight + 10));
      rect.setAttribute("width", String(magnitude));
      rect.setAttribute("height", String(rowHeight - 10));
      rect.setAttribute("fill", bar.color);
      svg.append(rect);
    });
  } else {
    const points = spec.points ?? [];
    const values = points.map((point) => point.value);
    if (spec.baseline !== undefined) values.push(spec.baseline);
    const low = Math.min(...values);
    const high = Math.max(...values);
    const span = Math.max(1e-9, high - low);
    const xOf = (value: number) => 10 + ((value - low) / span) * (width - 20);
    if (spec.baseline !== undefined) {
      const line = doc.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(xOf(spec.baseline)));
      line.setAttribute("x2", String(xOf(spec.baseline)));
      line.setAttribute("y1", "0");
      line.setAttribute("y2", String(height));
      line.setAttribute("stroke", spec.axis_color);
      line.setAttribute("stroke-dasharray", "4 3");
      svg.append(line);
    }
    points.forEach((point, index) => {
      const circle = doc.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(xOf(point.value)));
      circle.setAttribute("cy", String(index * rowHeight + rowHeight / 2 + 10));
      circle.setAttribute("r", "6");
      circle.setAttribute("fill", point.color);
      svg.append(circle);
    });
  }
  return svg;
}

export async function init(root: HTMLElement, options: AppOptions = {}): Promise<AppController> {
  const fetchImpl = options.fetchImpl ?? ((url: string) => fetch(url));
  const controller = new AppController(root, fetchImpl, options.audioContext ?? null);
  await controller.start();
  return controller;
}
