import { beforeEach, describe, expect, it } from "vitest";

import { ComparisonPane, buildComparisonViewModel } from "../src/comparisonPane.js";
import {
  BASELINE,
  COMPARE_FIVE,
  MockApi,
  SIMILARITY_FIVE,
  TYPE_IDS,
} from "./fixtures.js";

const MIX_B = [16.46, 71.67, 11.79, 10.59, 24.39];

describe("comparison pane", () => {
  let container: HTMLElement;
  let api: MockApi;
  let pane: ComparisonPane;

  beforeEach(() => {
    container = document.createElement("div");
    document.body.replaceChildren(container);
    api = new MockApi();
    pane = new ComparisonPane(container, api, TYPE_IDS);
  });

  it("renders the preference banner with the payload ratio", async () => {
    await pane.compare(BASELINE, MIX_B);
    const banner = container.querySelector(".banner");
    expect(banner?.textContent).toBe("B preferred, R = 3.47");
    expect(banner?.classList.contains("verdict-b_preferred")).toBe(true);
    expect(container.querySelector(".totals")?.textContent).toBe("gain 0.498 loss 0.144");
  });

  it("renders the paired proximity bars from the payloads", async () => {
    api.proximityByMix.set(JSON.stringify(BASELINE), { proximity: 70.0, progress: 30.0 });
    api.proximityByMix.set(JSON.stringify(MIX_B), { proximity: 58.2, progress: 41.8 });
    await pane.compare(BASELINE, MIX_B);
    const barA = container.querySelector('.prox-bar[data-mix="a"]') as HTMLElement;
    const barB = container.querySelector('.prox-bar[data-mix="b"]') as HTMLElement;
    expect(barA.getAttribute("style")).toContain("width: 30%");
    expect(barB.getAttribute("style")).toContain("width: 41.8%");
  });

  it("flags exactly the types the similarity payload marks", async () => {
    await pane.compare(BASELINE, MIX_B);
    const flagged = Array.from(container.querySelectorAll("tr .flag")).map((el) =>
      el.closest("tr")?.getAttribute("data-type"),
    );
    expect(flagged).toEqual(["T1", "T2", "T3"]);
    expect(container.querySelector(".similarity")?.textContent).toBe(
      "similarity 40% dissimilarity 60%",
    );
  });

  it("shows every number straight from the payloads", async () => {
    await pane.compare(BASELINE, MIX_B);
    const t1 = container.querySelector('tr[data-type="T1"]');
    expect(t1?.querySelector(".a")?.textContent).toBe("5.68");
    expect(t1?.querySelector(".b")?.textContent).toBe("16.46");
    expect(t1?.querySelector(".diff")?.textContent).toContain("+10.78");
    // expert columns are collapsed by default and carry the payload deltas
    expect(container.querySelector(".scaled")).toBeNull();
    pane.toggleExpertDetail();
    const scaled = container.querySelector('tr[data-type="T1"] .scaled');
    expect(scaled?.textContent).toBe("+0.4280");
    const scaledSq = container.querySelector('tr[data-type="T1"] .scaled-sq');
    expect(scaledSq?.textContent).toBe((0.428 * 0.428).toFixed(4));
  });

  it("flips the banner for a subset restriction", async () => {
    api.compareResponse = {
      ...COMPARE_FIVE,
      deltas: [0, 0, -0.132, 0.0035, -0.057],
      gain: 0.00352,
      loss: 0.144,
      ratio: 0.0245,
      verdict: "a_preferred",
      subset: ["T3", "T4", "T5"],
    };
    await pane.compare(BASELINE, MIX_B, undefined, ["T3", "T4", "T5"]);
    expect(api.compareCalls[0].subset).toEqual(["T3", "T4", "T5"]);
    expect(container.querySelector(".banner")?.textContent).toBe("A preferred, R = 0.02");
    expect(container.querySelector(".subset")?.textContent).toContain("T3, T4, T5");
  });

  it("reports equivalence for identical mixes", async () => {
    api.compareResponse = {
      ...COMPARE_FIVE,
      deltas: [0, 0, 0, 0, 0],
      gain: 0,
      loss: 0,
      ratio: null,
      verdict: "equivalent",
    };
    api.similarityResponse = {
      ...SIMILARITY_FIVE,
      per_type_significant: [false, false, false, false, false],
      los: 100,
      lod: 0,
      similar_overall: true,
    };
    await pane.compare(BASELINE, BASELINE);
    expect(container.querySelector(".banner")?.textContent).toBe(
      "Equivalent, R = undefined",
    );
    expect(container.querySelectorAll(".flag").length).toBe(0);
  });

  it("view model mirrors the payloads field by field", () => {
    const vm = buildComparisonViewModel(TYPE_IDS, BASELINE, MIX_B, COMPARE_FIVE, SIMILARITY_FIVE);
    expect(vm.rows.map((r) => r.scaled)).toEqual(COMPARE_FIVE.deltas);
    expect(vm.rows.map((r) => r.significant)).toEqual(SIMILARITY_FIVE.per_type_significant);
    expect(vm.gain).toBe(COMPARE_FIVE.gain);
    expect(vm.ratio).toBe(COMPARE_FIVE.ratio);
    expect(vm.los).toBe(SIMILARITY_FIVE.los);
  });
});
