import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AnalyticsPanel, buildDaySeries, totalCount } from "../src/analytics.js";
import { DEFAULT_AGGREGATES, createFixtureFetch, fixtureSchema } from "./fixture_server.js";

function setInput(root: HTMLElement, name: string, value: string) {
  (root.querySelector(`[name=${name}]`) as HTMLInputElement).value = value;
}

describe("buildDaySeries", () => {
  it("sorts buckets by date and copies counts", () => {
    const series = buildDaySeries([
      { date: "2020-03-05", counts: { yes: 1 } },
      { date: "2020-03-01", counts: { no: 2 } },
    ]);
    expect(series.map((d) => d.date)).toEqual(["2020-03-01", "2020-03-05"]);
  });

  it("totals equal the sum over all buckets", () => {
    expect(totalCount(DEFAULT_AGGREGATES["Q1/binary"])).toBe(13);
  });
});

describe("AnalyticsPanel", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = `<div id="panel"></div>`;
    root = document.getElementById("panel") as HTMLElement;
  });

  it("renders one column per day with totals matching the endpoint exactly", async () => {
    const { fetchFn } = createFixtureFetch();
    const panel = new AnalyticsPanel(root, new ApiClient("", fetchFn), fixtureSchema);
    setInput(root, "question", "Q1");
    setInput(root, "task", "binary");
    await panel.load();

    const ticks = root.querySelectorAll(".tick");
    expect(ticks).toHaveLength(2); // two days of fixture data

    // Per-day segment totals must equal the aggregate endpoint's counts.
    const perDay: Record<string, number> = {};
    for (const segment of root.querySelectorAll(".segment")) {
      const el = segment as SVGRectElement;
      const day = el.dataset.date as string;
      perDay[day] = (perDay[day] ?? 0) + Number(el.dataset.count);
    }
    const expected: Record<string, number> = {};
    for (const bucket of DEFAULT_AGGREGATES["Q1/binary"]) {
      expected[bucket.date] = Object.values(bucket.counts).reduce((a, b) => a + b, 0);
    }
    expect(perDay).toEqual(expected);

    // The header total equals the endpoint total.
    const header = root.querySelector(".analytics-header") as HTMLElement;
    expect(header.dataset.total).toBe(String(totalCount(DEFAULT_AGGREGATES["Q1/binary"])));
  });

  it("renders per-label segment counts exactly as returned", async () => {
    const { fetchFn } = createFixtureFetch();
    const panel = new AnalyticsPanel(root, new ApiClient("", fetchFn), fixtureSchema);
    setInput(root, "question", "Q6");
    setInput(root, "task", "multiclass");
    await panel.load();

    const got: Record<string, Record<string, number>> = {};
    for (const segment of root.querySelectorAll(".segment")) {
      const el = segment as SVGRectElement;
      const day = el.dataset.date as string;
      got[day] = got[day] ?? {};
      got[day][el.dataset.label as string] = Number(el.dataset.count);
    }
    const expected: Record<string, Record<string, number>> = {};
    for (const bucket of DEFAULT_AGGREGATES["Q6/multiclass"]) {
      expected[bucket.date] = { ...bucket.counts };
    }
    expect(got).toEqual(expected);
  });

  it("shows an explicit empty state when nothing matches", async () => {
    const { fetchFn } = createFixtureFetch({ aggregates: {} });
    const panel = new AnalyticsPanel(root, new ApiClient("", fetchFn), fixtureSchema);
    await panel.load();
    expect(root.querySelector(".empty-state")).not.toBeNull();
    expect((root.querySelector(".analytics-header") as HTMLElement).dataset.total)
      .toBe("0");
  });

  it("blocks an inverted date range before any request", async () => {
    const { fetchFn, calls } = createFixtureFetch();
    const panel = new AnalyticsPanel(root, new ApiClient("", fetchFn), fixtureSchema);
    setInput(root, "from", "2020-03-09");
    setInput(root, "to", "2020-03-01");
    await panel.load();
    expect(calls).toHaveLength(0);
    const status = root.querySelector(".status") as HTMLElement;
    expect(status.classList.contains("error")).toBe(true);
    expect(status.textContent).toContain("Invalid range");
  });

  it("applies the date filter through the endpoint", async () => {
    const { fetchFn } = createFixtureFetch();
    const panel = new AnalyticsPanel(root, new ApiClient("", fetchFn), fixtureSchema);
    setInput(root, "question", "Q1");
    setInput(root, "from", "2020-03-02");
    setInput(root, "to", "2020-03-02");
    await panel.load();
    expect(root.querySelectorAll(".tick")).toHaveLength(1);
    expect((root.querySelector(".analytics-header") as HTMLElement).dataset.total)
      .toBe("3");
  });
});
