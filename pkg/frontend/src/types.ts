/** Response payload shapes for the benchmark results API. */

export type AttributeType = "INTEGER" | "REAL" | "BOOLEAN" | "ENUM" | "STRING";

export interface AttributeInfo {
  name: string;
  type: AttributeType;
}

export interface Entities {
  problems: string[];
  planners: string[];
  versions: string[];
  run_attributes: AttributeInfo[];
  progress_attributes: AttributeInfo[];
}

export interface MissingRow {
  planner: string;
  total: number;
  missing: number;
}

export interface Labels {
  x: string;
  y: string;
}

export interface BoxData {
  planner: string;
  n: number;
  n_missing: number;
  median: number | null;
  q1: number | null;
  q3: number | null;
  whisker_low: number | null;
  whisker_high: number | null;
  notch_low: number | null;
  notch_high: number | null;
  outliers: (number | null)[];
}

export interface CurveData {
  planner: string;
  points: [number, number][];
}

export interface FractionData {
  planner: string;
  fraction: number | null;
  ci_low: number | null;
  ci_high: number | null;
  n: number;
}

export interface PerformancePayload {
  kind: "performance";
  problem: string;
  attribute: string;
  attribute_type: AttributeType;
  version: string;
  planners: string[];
  missing: MissingRow[];
  labels: Labels;
  mode: "box" | "ecdf" | "success";
  boxes?: BoxData[];
  curves?: CurveData[];
  fractions?: FractionData[];
}

export interface AggregateData {
  planner: string;
  grid: number[];
  mean: (number | null)[];
  ci_low: (number | null)[];
  ci_high: (number | null)[];
  counts_1s: number[];
  n_runs: number;
}

export interface PointSet {
  planner: string;
  points: [number, number][];
}

export interface ProgressPayload {
  kind: "progress";
  problem: string;
  attribute: string;
  version: string;
  planners: string[];
  time_limit: number;
  grid_step: number;
  smooth_window: number;
  aggregates: AggregateData[];
  points?: PointSet[];
  missing: MissingRow[];
  labels: Labels;
}

export interface BarData {
  planner: string;
  version: string;
  mean: number;
  stderr: number | null;
  n: number;
}

export interface RegressionPayload {
  kind: "regression";
  problem: string;
  attribute: string;
  version: string;
  planners: string[];
  versions: string[];
  bars: BarData[];
  missing: MissingRow[];
  labels: Labels;
}

export type PlotPayload = PerformancePayload | ProgressPayload | RegressionPayload;

export interface ErrorPayload {
  error: string;
}

export interface UploadResult {
  experiment_id: number;
}
