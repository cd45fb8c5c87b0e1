export const ALERT_ID = "sr-alert";
export const ASSERTIVE_ID = "sr-live";
export const STATUS_ID = "sr-status";

function setLiveText(root: ParentNode, id: string, text: string): void {
  const region = root.querySelector<HTMLElement>(`#${id}`);
  if (!region) return;
  // clear first so repeating the same text is still announced
  region.textContent = "";
  region.textContent = text;
}

/** Table loads and hints: polite, read when the screen reader is idle. */
export function announcePolite(root: ParentNode, text: string): void {
  setLiveText(root, STATUS_ID, text);
}

/** Explanation arrivals and stepping: assertive, read immediately. */
export function announceAssertive(root: ParentNode, text: string): void {
  setLiveText(root, ASSERTIVE_ID, text);
}

/** Errors: the visible alert region doubles as the screen-reader alert. */
export function showAlert(root: ParentNode, text: string): void {
  setLiveText(root, ALERT_ID, text);
}

export function clearAlert(root: ParentNode): void {
  setLiveText(root, ALERT_ID, "");
}
