/** The slider board: one bar per patient type, a marker at its current count.
 *
 * Dragging (or typing) a new value for one type issues an alteration request;
 * the returned mix is previewed on every marker together with a
 * before/after/change table and accept/reject buttons. Accepting promotes the
 * proposal into the session baseline on the server; rejecting restores the
 * board. The board never computes model numbers itself.
 */

import type { CasemixApi } from "./api.js";
import type { AlterationResponse } from "./types.js";
import { fmt, fmtSigned, percent } from "./format.js";

export const VIRTUALIZE_AFTER = 30;

export type Method = "eq" | "lin" | "ssq";

export interface TypeSlider {
  id: string;
  current: number;
  upper: number;
  pending: number | null;
}

export interface SliderBoardState {
  types: TypeSlider[];
  selected: string | null;
  method: Method;
  busy: boolean;
  proposal: AlterationResponse | null;
  error: string | null;
  filter: string;
}

export class SliderBoard {
  readonly state: SliderBoardState;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: CasemixApi,
    typeIds: string[],
    currents: number[],
    uppers: number[],
  ) {
    this.state = {
      types: typeIds.map((id, g) => ({
        id,
        current: currents[g],
        upper: uppers[g],
        pending: null,
      })),
      selected: null,
      method: "eq",
      busy: false,
      proposal: null,
      error: null,
      filter: "",
    };
    this.render();
  }

  setMethod(method: Method): void {
    this.state.method = method;
    this.render();
  }

  /** Issue the alteration for dragging `typeId` to `value`. */
  async commit(typeId: string, value: number): Promise<void> {
    const s = this.state;
    if (s.busy || s.proposal) return; // one in-flight change at a time
    const slider = s.types.find((t) => t.id === typeId);
    if (!slider) throw new Error(`unknown type ${typeId}`);
    const delta = value - slider.current;
    if (delta === 0) return; // nothing to ask
    s.selected = typeId;
    s.busy = true;
    s.error = null;
    this.render();
    try {
      const proposal = await this.api.alterType(typeId, delta, s.method);
      s.proposal = proposal;
      s.types.forEach((t, g) => {
        t.pending = proposal.new_mix[g];
      });
    } catch (err) {
      s.error = err instanceof Error ? err.message : String(err);
      s.selected = null;
    } finally {
      s.busy = false;
      this.render();
    }
  }

  async accept(): Promise<void> {
    const s = this.state;
    if (!s.proposal) return;
    await this.api.decide(s.proposal.entry_index, "accepted");
    s.types.forEach((t) => {
      if (t.pending !== null) t.current = t.pending;
      t.pending = null;
    });
    this.clearProposal();
  }

  async reject(): Promise<void> {
    const s = this.state;
    if (!s.proposal) return;
    await this.api.decide(s.proposal.entry_index, "rejected");
    s.types.forEach((t) => {
      t.pending = null;
    });
    this.clearProposal();
  }

  private clearProposal(): void {
    this.state.proposal = null;
    this.state.selected = null;
    this.render();
  }

  markerPercent(slider: TypeSlider): number {
    const value = slider.pending ?? slider.current;
    return percent(value, slider.upper);
  }

  barHeightPercent(slider: TypeSlider): number {
    const tallest = Math.max(...this.state.types.map((t) => t.upper));
    return percent(slider.upper, tallest);
  }

  render(): void {
    const s = this.state;
    const virtual = s.types.length > VIRTUALIZE_AFTER;
    const visible = virtual && s.filter
      ? s.types.filter((t) => t.id.toLowerCase().includes(s.filter.toLowerCase()))
      : s.types;
    const bars = visible
      .map((t) => {
        const marker = this.markerPercent(t);
        const height = this.barHeightPercent(t);
        const classes = ["slider"];
        if (t.id === s.selected) classes.push("selected");
        if (t.pending !== null) classes.push("pending");
        return `
        <div class="${classes.join(" ")}" data-type="${t.id}">
          <div class="bar" style="height: ${height}%">
            <div class="marker" style="bottom: ${marker}%"></div>
          </div>
          <label>${t.id}</label>
          <output>${fmt(t.pending ?? t.current)}</output>
          <input type="number" min="0" max="${t.upper}" step="0.01"
                 value="${fmt(t.pending ?? t.current)}" ${s.busy || s.proposal ? "disabled" : ""}/>
        </div>`;
      })
      .join("");
    const methods = (["eq", "lin", "ssq"] as Method[])
      .map(
        (m) =>
          `<label><input type="radio" name="method" value="${m}" ` +
          `${s.method === m ? "checked" : ""}/> ${m.toUpperCase()}</label>`,
      )
      .join(" ");
    const proposal = s.proposal ? this.renderProposal(s.proposal) : "";
    const error = s.error ? `<p class="error">${s.error}</p>` : "";
    const search = virtual
      ? `<input class="search" placeholder="filter types" value="${s.filter}"/>`
      : "";
    this.container.innerHTML = `
      <div class="method-picker">${methods}</div>
      ${search}
      <div class="board ${virtual ? "virtual" : ""}" ${s.busy ? 'data-busy="1"' : ""}>
        ${bars}
      </div>
      ${error}
      ${proposal}`;
    this.wire();
  }

  private renderProposal(p: AlterationResponse): string {
    const rows = this.state.types
      .map((t, g) => {
        const after = p.new_mix[g];
        return `<tr data-type="${t.id}"><td>${t.id}</td><td class="before">${fmt(t.current)}</td>` +
          `<td class="after">${fmt(after)}</td>` +
          `<td class="change">${fmtSigned(after - t.current)}</td></tr>`;
      })
      .join("");
    const level = p.uniform_deviation !== null
      ? `<span class="level">level ${fmt(p.uniform_deviation, 4)}</span>`
      : "";
    return `
      <div class="proposal">
        <table class="changes">
          <thead><tr><th>Type</th><th>Before</th><th>After</th><th>Change</th></tr></thead>
          <tbody>${rows}</tbody>
        </table>
        <p class="totals">total ${fmt(p.total)} impact ${fmtSigned(p.total_impact ?? 0)} ${level}</p>
        <button class="accept">Accept</button>
        <button class="reject">Reject</button>
      </div>`;
  }

  private wire(): void {
    this.container.querySelectorAll<HTMLInputElement>(".slider input[type=number]").forEach(
      (input) => {
        input.addEventListener("change", () => {
          const type = input.closest(".slider")?.getAttribute("data-type");
          if (type) void this.commit(type, Number(input.value));
        });
      },
    );
    this.container.querySelectorAll<HTMLInputElement>("input[name=method]").forEach((radio) => {
      radio.addEventListener("change", () => this.setMethod(radio.value as Method));
    });
    const search = this.container.querySelector<HTMLInputElement>("input.search");
    search?.addEventListener("input", () => {
      this.state.filter = search.value;
      this.render();
    });
    this.container.querySelector("button.accept")?.addEventListener("click", () => {
      void this.accept();
    });
    this.container.querySelector("button.reject")?.addEventListener("click", () => {
      void this.reject();
    });
  }
}
