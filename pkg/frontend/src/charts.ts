// Hand-rolled charts: probability bars for the classifier panel and a
// stacked day-series for analytics. No chart library, just DOM/SVG.

const SERIES_COLORS = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

export function seriesColor(index: number): string {
  return SERIES_COLORS[index % SERIES_COLORS.length];
}

function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Render one bar per label, in the given order, with percentages. */
export function renderProbabilityBars(
  root: HTMLElement,
  order: string[],
  probabilities: Record<string, number>,
): void {
  root.innerHTML = order
    .map((label) => {
      const p = probabilities[label] ?? 0;
      const pct = (100 * p).toFixed(1);
      return `
        <div class="bar-row" data-label="${escapeHtml(label)}" data-probability="${p}">
          <div class="bar-label" title="${escapeHtml(label)}">${escapeHtml(label)}</div>
          <div class="bar-track"><div class="bar-fill" style="width:${pct}%"></div></div>
          <div class="bar-value">${pct}%</div>
        </div>`;
    })
    .join("");
}

export interface StackedSeriesDay {
  date: string;
  counts: Record<string, number>;
}

/**
 * Stacked bar chart over days: one column per day, one segment per label
 * in schema order. Column heights are proportional to the day's total.
 */
export function renderStackedSeries(
  root: HTMLElement,
  order: string[],
  days: StackedSeriesDay[],
): void {
  if (days.length === 0) {
    root.innerHTML = `<div class="empty-state">No records match this filter.</div>`;
    return;
  }
  const width = 720;
  const height = 240;
  const pad = { left: 36, right: 8, top: 8, bottom: 44 };
  const plotW = width - pad.left - pad.right;
  const plotH = height - pad.top - pad.bottom;
  const maxTotal = Math.max(
    ...days.map((d) => order.reduce((acc, label) => acc + (d.counts[label] ?? 0), 0)),
  );
  const colW = plotW / days.length;
  const barW = Math.min(40, colW * 0.8);

  const columns = days
    .map((day, i) => {
      const x = pad.left + i * colW + (colW - barW) / 2;
      let yCursor = pad.top + plotH;
      const segments = order
        .map((label, li) => {
          const count = day.counts[label] ?? 0;
          if (count === 0) return "";
          const h = (count / maxTotal) * plotH;
          yCursor -= h;
          return `<rect class="segment" data-date="${day.date}" data-label="${escapeHtml(label)}"
            data-count="${count}" x="${x.toFixed(1)}" y="${yCursor.toFixed(1)}"
            width="${barW.toFixed(1)}" height="${h.toFixed(1)}" fill="${seriesColor(li)}">
            <title>${day.date} — ${escapeHtml(label)}: ${count}</title></rect>`;
        })
        .join("");
      const total = order.reduce((acc, label) => acc + (day.counts[label] ?? 0), 0);
      const tick = `<text class="tick" data-date="${day.date}" data-total="${total}"
        x="${(x + barW / 2).toFixed(1)}" y="${height - pad.bottom + 14}"
        text-anchor="middle" transform="rotate(40 ${(x + barW / 2).toFixed(1)} ${height - pad.bottom + 14})"
        font-size="9">${day.date.slice(5)}</text>`;
      return segments + tick;
    })
    .join("");

  const axis = `<line x1="${pad.left}" y1="${pad.top + plotH}" x2="${width - pad.right}"
    y2="${pad.top + plotH}" stroke="#888"/>
    <text x="4" y="${pad.top + 10}" font-size="9" fill="#666">${maxTotal}</text>`;

  const legend = order
    .map(
      (label, li) => `
      <span class="legend-item"><span class="legend-swatch"
        style="background:${seriesColor(li)}"></span>${escapeHtml(label)}</span>`,
    )
    .join("");

  root.innerHTML = `
    <svg viewBox="0 0 ${width} ${height}" role="img" class="series-chart">${axis}${columns}</svg>
    <div class="legend">${legend}</div>`;
}
