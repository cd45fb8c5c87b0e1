/** Wire types mirroring the JSON served by the explanation service. */

export type MethodValue =
  | "lime-simplified"
  | "lime-detailed"
  | "shap-simplified"
  | "shap-detailed";

export interface MethodOption {
  value: MethodValue;
  label: string;
}

export interface Persona {
  name: string;
  age: number;
  role: string;
  description: string;
}

export interface Scenario {
  impact: string;
  function: string;
  transparency: string;
  reasoning: string;
  persona: Persona;
  button_label: string;
  methods: MethodOption[];
}

export interface PredictionRow {
  row_id: number;
  pred_flow: number;
  city: string;
  detector: string;
  speed: number;
  occupancy: number;
}

export interface Tone {
  frequency: number;
  pan: number;
  duration_ms: number;
}

export interface Sonification {
  tones: Tone[];
}

export interface RankedItem {
  feature: string;
  raw_value: number;
  contribution: number;
  direction: string;
}

export interface ChartBar {
  label: string;
  value: number;
  color: string;
}

export interface ChartPoint {
  label: string;
  value: number;
  delta: number;
  color: string;
}

export interface ChartSpec {
  kind: "bar" | "point";
  title: string;
  background: string;
  axis_color: string;
  bars?: ChartBar[];
  points?: ChartPoint[];
  baseline?: number;
}

export interface Palette {
  text: string;
  background: string;
  positive: string;
  negative: string;
  neutral: string;
  pairs: [string, string][];
}

export interface AriaPlan {
  role: string;
  label: string;
  reading_order: string[];
  section_labels: Record<string, string>;
  item_descriptions: string[];
  palette: Palette;
}

export interface ExplanationDetail {
  base_or_intercept: number;
  fidelity?: number;
  running_sums?: number[];
  groups?: { positive: string[]; negative: string[] };
}

export interface Explanation {
  method: MethodValue;
  summary_text: string;
  ranked_items: RankedItem[];
  detail?: ExplanationDetail;
  sonification?: Sonification;
  chart_spec: ChartSpec;
  aria: AriaPlan;
}
