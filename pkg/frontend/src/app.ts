/** Wires the three panels to the live service. */

import { HttpApi } from "./api.js";
import { BoundsPanel } from "./boundsPanel.js";
import { ComparisonPane } from "./comparisonPane.js";
import { SliderBoard } from "./sliderBoard.js";

function parseMix(text: string): number[] {
  return text
    .split(",")
    .map((v) => Number(v.trim()))
    .filter((v) => Number.isFinite(v));
}

export async function boot(root: Document = document): Promise<void> {
  const api = new HttpApi();
  const scenario = await api.getScenario();
  const session = await api.getSession();
  const typeIds = scenario.scenario.patient_types.map((t) => t.id);

  const boundsHost = root.getElementById("bounds-panel");
  if (boundsHost) new BoundsPanel(boundsHost, api);

  const boardHost = root.getElementById("slider-board");
  if (boardHost) {
    const bounds = scenario.type_bounds ?? [];
    const uppers = typeIds.map((_, g) => bounds[g] ?? Math.max(1, session.current_mix[g] * 2));
    new SliderBoard(boardHost, api, typeIds, session.current_mix, uppers);
  }

  const compareHost = root.getElementById("comparison-pane");
  if (compareHost) {
    const pane = new ComparisonPane(compareHost, api, typeIds);
    const form = root.getElementById("comparison-form") as HTMLFormElement | null;
    form?.addEventListener("submit", (event) => {
      event.preventDefault();
      const a = parseMix((root.getElementById("mix-a") as HTMLInputElement).value);
      const b = parseMix((root.getElementById("mix-b") as HTMLInputElement).value);
      const epsText = (root.getElementById("mix-eps") as HTMLInputElement).value;
      const eps = epsText ? parseMix(epsText) : undefined;
      void pane.compare(a, b, eps);
    });
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.addEventListener("DOMContentLoaded", () => {
    void boot();
  });
}
