import { ApiClient, ApiRequestError } from "./api.js";
import { renderStackedSeries, type StackedSeriesDay } from "./charts.js";
import { labelOrder, type ApiSchema, type DayBucket, type Task } from "./types.js";

/** Sorted per-day rows ready for the stacked chart; pure, unit-tested. */
export function buildDaySeries(buckets: DayBucket[]): StackedSeriesDay[] {
  return [...buckets]
    .sort((a, b) => a.date.localeCompare(b.date))
    .map((b) => ({ date: b.date, counts: { ...b.counts } }));
}

export function totalCount(buckets: DayBucket[]): number {
  return buckets.reduce(
    (acc, b) => acc + Object.values(b.counts).reduce((s, c) => s + c, 0),
    0,
  );
}

/**
 * Analytics panel: keyword + date range + question/task selectors, a
 * stacked day-wise chart, and a header total. Invalid ranges are blocked
 * before any request; a new load aborts the previous one.
 */
export class AnalyticsPanel {
  private inflight: AbortController | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly schema: ApiSchema,
  ) {
    this.render();
  }

  private render(): void {
    const questionOptions = this.schema.questions
      .map((q) => `<option value="${q.id}">${q.id}: ${q.prompt}</option>`)
      .join("");
    this.root.innerHTML = `
      <h2>Tweet Analytics</h2>
      <form class="analytics-form">
        <input name="keyword" type="text" placeholder="keyword (optional)"/>
        <label>From <input name="from" type="date"/></label>
        <label>To <input name="to" type="date"/></label>
        <label>Language
          <select name="language">
            <option value="">all</option>
            <option value="ar">Arabic</option>
            <option value="bg">Bulgarian</option>
            <option value="nl">Dutch</option>
            <option value="en">English</option>
          </select>
        </label>
        <label>Question <select name="question">${questionOptions}</select></label>
        <label>Task
          <select name="task">
            <option value="binary" selected>binary</option>
            <option value="multiclass">multiclass</option>
          </select>
        </label>
        <button type="submit">Load analytics</button>
      </form>
      <div class="status" role="status"></div>
      <div class="analytics-header"></div>
      <div class="chart"></div>`;
    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.load();
    });
  }

  private get form(): HTMLFormElement {
    return this.root.querySelector("form") as HTMLFormElement;
  }

  private get statusEl(): HTMLElement {
    return this.root.querySelector(".status") as HTMLElement;
  }

  private get headerEl(): HTMLElement {
    return this.root.querySelector(".analytics-header") as HTMLElement;
  }

  private get chartEl(): HTMLElement {
    return this.root.querySelector(".chart") as HTMLElement;
  }

  async load(): Promise<void> {
    const data = new FormData(this.form);
    const dateFrom = String(data.get("from") ?? "");
    const dateTo = String(data.get("to") ?? "");
    if (dateFrom && dateTo && dateFrom > dateTo) {
      this.statusEl.textContent = "Invalid range: the from date is after the to date.";
      this.statusEl.className = "status error";
      return;
    }
    const question = String(data.get("question"));
    const task = String(data.get("task")) as Task;

    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.statusEl.textContent = "Loading…";
    this.statusEl.className = "status pending";
    try {
      const response = await this.client.getAggregates(
        {
          question,
          task,
          keyword: String(data.get("keyword") ?? "") || undefined,
          dateFrom: dateFrom || undefined,
          dateTo: dateTo || undefined,
          language: String(data.get("language") ?? "") || undefined,
        },
        controller.signal,
      );
      if (controller.signal.aborted) return;
      const total = totalCount(response.buckets);
      this.headerEl.textContent =
        `${total} record${total === 1 ? "" : "s"} over ${response.buckets.length} day` +
        `${response.buckets.length === 1 ? "" : "s"} — ${question} (${task})`;
      this.headerEl.dataset.total = String(total);
      renderStackedSeries(
        this.chartEl,
        labelOrder(this.schema, question, task),
        buildDaySeries(response.buckets),
      );
      this.statusEl.textContent = "";
      this.statusEl.className = "status";
    } catch (err) {
      if (controller.signal.aborted) return;
      const message =
        err instanceof ApiRequestError ? `${err.code}: ${err.message}` : String(err);
      this.statusEl.textContent = message;
      this.statusEl.className = "status error";
    }
  }
}
