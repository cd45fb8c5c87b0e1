import type { Explanation, MethodValue, PredictionRow } from "./types.js";

/** Single-session UI state.
 *
 * Invariants: focus_index stays inside [0, ranked_items.length) whenever an
 * explanation is shown, and an explanation can only be present when both a
 * row and a method are selected.
 */
export interface UiState {
  predictions: PredictionRow[];
  selectedRow: number | null;
  selectedMethod: MethodValue | null;
  explanation: Explanation | null;
  focusIndex: number;
}

export function initialState(): UiState {
  return {
    predictions: [],
    selectedRow: null,
    selectedMethod: null,
    explanation: null,
    focusIndex: 0,
  };
}

export function withPredictions(state: UiState, rows: PredictionRow[]): UiState {
  // a fresh table invalidates any prior selection
  return { ...initialState(), predictions: rows };
}

export function withRowSelected(state: UiState, rowId: number): UiState {
  return { ...state, selectedRow: rowId, explanation: null, focusIndex: 0 };
}

export function withMethodSelected(state: UiState, method: MethodValue): UiState {
  return { ...state, selectedMethod: method, explanation: null, focusIndex: 0 };
}

export function withExplanation(state: UiState, explanation: Explanation): UiState {
  if (state.selectedRow === null || state.selectedMethod === null) {
    throw new Error("an explanation requires both a selected row and a selected method");
  }
  return { ...state, explanation, focusIndex: 0 };
}

export interface StepResult {
  state: UiState;
  atBoundary: boolean;
}

/** Move the data-point focus one step; never wraps past either end. */
export function stepFocus(state: UiState, direction: 1 | -1): StepResult {
  const explanation = state.explanation;
  if (!explanation) {
    return { state, atBoundary: true };
  }
  const next = state.focusIndex + direction;
  if (next < 0 || next >= explanation.ranked_items.length) {
    return { state, atBoundary: true };
  }
  return { state: { ...state, focusIndex: next }, atBoundary: false };
}

/** Client-side mirror of the server cache: explanations are deterministic,
 * so re-selecting a (row, method) pair must not refetch.
 */
export class ExplanationCache {
  private readonly store = new Map<string, Explanation>();

  private static key(rowId: number, method: MethodValue): string {
    return `${rowId}:${method}`;
  }

  get(rowId: number, method: MethodValue): Explanation | undefined {
    return this.store.get(ExplanationCache.key(rowId, method));
  }

  set(rowId: number, method: MethodValue, explanation: Explanation): void {
    this.store.set(ExplanationCache.key(rowId, method), explanation);
  }

  get size(): number {
    return this.store.size;
  }
}

/** Tokens for in-flight fetches; a response is applied only if its token is
 * still the newest, so a superseded selection can never clobber a newer one.
 */
export class RequestSequencer {
  private seq = 0;

  next(): number {
    this.seq += 1;
    return this.seq;
  }

  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}
