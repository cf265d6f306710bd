/** Comparison pane: two case mixes, per-type detail, and the gain/loss verdict.
 *
 * Every figure shown is taken from the compare/similarity payloads; the pane
 * adds no arithmetic beyond display rounding. Differences whose magnitude
 * exceeds the significance threshold carry a "(*)" flag. The full calculation
 * columns (scaled and squared values) target expert users and collapse behind
 * a toggle.
 */

import type { CasemixApi } from "./api.js";
import type { CompareResponse, SimilarityResponse } from "./types.js";
import { fmt, fmtSigned } from "./format.js";

export interface ComparisonRow {
  type: string;
  a: number;
  b: number;
  diff: number;
  scaled: number;
  scaledSq: number;
  significant: boolean;
}

export interface ComparisonViewModel {
  rows: ComparisonRow[];
  gain: number;
  loss: number;
  ratio: number | null;
  verdict: CompareResponse["verdict"];
  los: number;
  lod: number;
  banner: string;
  subset: string[] | null;
  /** progress of each mix towards the ideal, for the paired proximity bars */
  progressA: number | null;
  progressB: number | null;
}

export function buildComparisonViewModel(
  typeIds: string[],
  a: number[],
  b: number[],
  compared: CompareResponse,
  sim: SimilarityResponse,
): ComparisonViewModel {
  const rows = typeIds.map((type, g) => ({
    type,
    a: a[g],
    b: b[g],
    diff: b[g] - a[g],
    scaled: compared.deltas[g],
    scaledSq: compared.deltas[g] * compared.deltas[g],
    significant: sim.per_type_significant[g],
  }));
  const ratioText = compared.ratio === null ? "undefined" : fmt(compared.ratio);
  const banner =
    compared.verdict === "equivalent"
      ? `Equivalent, R = ${ratioText}`
      : compared.verdict === "b_preferred"
        ? `B preferred, R = ${ratioText}`
        : `A preferred, R = ${ratioText}`;
  return {
    rows,
    gain: compared.gain,
    loss: compared.loss,
    ratio: compared.ratio,
    verdict: compared.verdict,
    los: sim.los,
    lod: sim.lod,
    banner,
    subset: compared.subset,
    progressA: null,
    progressB: null,
  };
}

export class ComparisonPane {
  viewModel: ComparisonViewModel | null = null;
  expertDetail = false;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: CasemixApi,
    private readonly typeIds: string[],
  ) {
    this.render();
  }

  /** Fetch the comparison, similarity and proximity reports, then render. */
  async compare(a: number[], b: number[], eps?: number[], subset?: string[]): Promise<void> {
    const [compared, sim, proxA, proxB] = await Promise.all([
      this.api.compare(a, b, eps, subset),
      this.api.similarity(a, b, eps),
      this.api.proximity(a),
      this.api.proximity(b),
    ]);
    this.viewModel = buildComparisonViewModel(this.typeIds, a, b, compared, sim);
    this.viewModel.progressA = proxA.progress;
    this.viewModel.progressB = proxB.progress;
    this.render();
  }

  toggleExpertDetail(): void {
    this.expertDetail = !this.expertDetail;
    this.render();
  }

  render(): void {
    const vm = this.viewModel;
    if (!vm) {
      this.container.innerHTML = `<p class="notice">Load two case mixes and press Compare.</p>`;
      return;
    }
    const expertHead = this.expertDetail ? `<th>Scaled</th><th>Scaled SQ</th>` : "";
    const rows = vm.rows
      .map((r) => {
        const expert = this.expertDetail
          ? `<td class="scaled">${fmtSigned(r.scaled, 4)}</td>` +
            `<td class="scaled-sq">${fmt(r.scaledSq, 4)}</td>`
          : "";
        return `<tr data-type="${r.type}">
          <td>${r.type}</td>
          <td class="a">${fmt(r.a)}</td>
          <td class="b">${fmt(r.b)}</td>
          <td class="diff">${fmtSigned(r.diff)}${r.significant ? ' <span class="flag">(*)</span>' : ""}</td>
          ${expert}</tr>`;
      })
      .join("");
    const subset = vm.subset
      ? `<p class="subset">Restricted to ${vm.subset.join(", ")}</p>`
      : "";
    const proximityBars =
      vm.progressA !== null && vm.progressB !== null
        ? `<div class="proximity-bars">
            <div class="prox-row"><span>A</span>
              <div class="prox-bar" data-mix="a" style="width: ${vm.progressA}%"></div>
              <span>${fmt(vm.progressA, 1)}%</span></div>
            <div class="prox-row"><span>B</span>
              <div class="prox-bar" data-mix="b" style="width: ${vm.progressB}%"></div>
              <span>${fmt(vm.progressB, 1)}%</span></div>
          </div>`
        : "";
    this.container.innerHTML = `
      <div class="banner verdict-${vm.verdict}">${vm.banner}</div>
      ${subset}
      ${proximityBars}
      <table class="comparison">
        <thead><tr><th>Type</th><th>Mix A</th><th>Mix B</th><th>Diff</th>${expertHead}</tr></thead>
        <tbody>${rows}</tbody>
      </table>
      <p class="totals">gain ${fmt(vm.gain, 3)} loss ${fmt(vm.loss, 3)}</p>
      <p class="similarity">similarity ${fmt(vm.los, 0)}% dissimilarity ${fmt(vm.lod, 0)}%</p>
      <button class="expert-toggle">${this.expertDetail ? "Hide" : "Show"} calculation detail</button>`;
    this.container.querySelector("button.expert-toggle")?.addEventListener("click", () => {
      this.toggleExpertDetail();
    });
  }
}
