/** View state: selected dataset, ordered system selection, active tab,
 * active bucket, error-table page.  Encoded in the URL hash so every
 * view is deep-linkable. */

export type Tab = "single" | "pair" | "bias" | "combine" | "calibration";

export const TABS: Tab[] = ["single", "pair", "bias", "combine", "calibration"];

export interface ViewState {
  dataset: string | null;
  systems: string[];
  tab: Tab;
  bucket: string | null;
  errorPage: number;
}

export function initialState(): ViewState {
  return { dataset: null, systems: [], tab: "single", bucket: null, errorPage: 1 };
}

/** Selection rules per tab; buttons are disabled when these fail. */
export function canActivate(tab: Tab, state: ViewState): boolean {
  const n = state.systems.length;
  switch (tab) {
    case "single":
    case "calibration":
      return n === 1;
    case "pair":
      return n === 2;
    case "combine":
      return n >= 2;
    case "bias":
      return state.dataset !== null;
  }
}

export function toggleSystem(state: ViewState, systemId: string): ViewState {
  const systems = state.systems.includes(systemId)
    ? state.systems.filter((s) => s !== systemId)
    : [...state.systems, systemId];
  return { ...state, systems, bucket: null, errorPage: 1 };
}

export function selectDataset(state: ViewState, dataset: string | null): ViewState {
  return { ...initialState(), dataset, tab: state.tab };
}

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.dataset) params.set("dataset", state.dataset);
  if (state.systems.length) params.set("systems", state.systems.join(","));
  params.set("tab", state.tab);
  if (state.bucket) params.set("bucket", state.bucket);
  if (state.errorPage > 1) params.set("page", String(state.errorPage));
  return `#${params.toString()}`;
}

export function decodeState(hash: string): ViewState {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const tab = params.get("tab") as Tab | null;
  return {
    dataset: params.get("dataset"),
    systems: params.get("systems")?.split(",").filter(Boolean) ?? [],
    tab: tab && TABS.includes(tab) ? tab : "single",
    bucket: params.get("bucket"),
    errorPage: Math.max(1, Number(params.get("page") ?? "1") || 1),
  };
}
