/** Progressive bound-analysis panel: one table row per completed type solve. */

import type { CasemixApi } from "./api.js";
import type { BoundEvent } from "./types.js";
import { fmt } from "./format.js";

export interface BoundsPanelState {
  running: boolean;
  complete: boolean;
  error: string | null;
  totalTypes: number | null;
  rows: Array<{ type: string; bound: number | null }>;
}

export function initialBoundsState(): BoundsPanelState {
  return { running: false, complete: false, error: null, totalTypes: null, rows: [] };
}

export class BoundsPanel {
  readonly state: BoundsPanelState = initialBoundsState();

  constructor(
    private readonly container: HTMLElement,
    private readonly api: CasemixApi,
  ) {
    this.render();
  }

  async start(): Promise<void> {
    if (this.state.running) return;
    this.state.running = true;
    this.state.complete = false;
    this.state.error = null;
    this.state.rows = [];
    this.render();
    await this.api.streamBounds({
      onBound: (event) => this.onBound(event),
      onDone: () => {
        this.state.running = false;
        this.state.complete = true;
        this.render();
      },
      onError: (message) => {
        this.state.running = false;
        this.state.error = message;
        this.render();
      },
    });
    // a stream that ends without a done event is a disconnect
    if (this.state.running) {
      this.state.running = false;
      this.state.error = "stream interrupted";
      this.render();
    }
  }

  private onBound(event: BoundEvent): void {
    this.state.totalTypes = event.total_types;
    this.state.rows.push({ type: event.type, bound: event.bound });
    this.render();
  }

  render(): void {
    const s = this.state;
    const rows = s.rows
      .map(
        (r) =>
          `<tr data-type="${r.type}"><td>${r.type}</td>` +
          `<td class="bound">${r.bound === null ? "uncapped" : fmt(r.bound, 3)}</td></tr>`,
      )
      .join("");
    const notice = s.error
      ? `<p class="error">${s.error}</p><button class="retry">Retry</button>`
      : s.complete && s.rows.length === 0
        ? `<p class="notice">No patient types to analyse.</p>`
        : s.complete
          ? `<p class="notice">Analysis complete.</p>`
          : "";
    this.container.innerHTML = `
      <button class="run" ${s.running ? "disabled" : ""}>Bound analysis</button>
      <table class="bounds"><thead><tr><th>Type</th><th>Upper bound</th></tr></thead>
      <tbody>${rows}</tbody></table>
      ${notice}`;
    this.container.querySelector("button.run")?.addEventListener("click", () => {
      void this.start();
    });
    this.container.querySelector("button.retry")?.addEventListener("click", () => {
      void this.start();
    });
  }
}
