import { ApiClient, ApiRequestError } from "./api.js";
import { renderProbabilityBars } from "./charts.js";
import { PollTimeoutError, pollResult } from "./polling.js";
import { labelOrder, type ApiSchema, type QuestionResult, type Task } from "./types.js";

/**
 * Tweet classifier panel: submit a text, poll for the job result, and
 * render one card per question with its probability bars. A new
 * submission aborts the previous in-flight poll.
 */
export class ClassifierPanel {
  private inflight: AbortController | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly schema: ApiSchema,
    private readonly pollOpts: { intervalMs?: number; timeoutMs?: number } = {},
  ) {
    this.render();
  }

  private render(): void {
    this.root.innerHTML = `
      <h2>Tweet Classifier</h2>
      <form class="classify-form">
        <label>Language
          <select name="language">
            <option value="ar">Arabic</option>
            <option value="bg">Bulgarian</option>
            <option value="nl">Dutch</option>
            <option value="en" selected>English</option>
          </select>
        </label>
        <label>Task
          <select name="task">
            <option value="binary" selected>binary</option>
            <option value="multiclass">multiclass</option>
          </select>
        </label>
        <textarea name="text" rows="4" placeholder="Paste a tweet text…"></textarea>
        <button type="submit">Classify tweet</button>
      </form>
      <div class="status" role="status"></div>
      <div class="results"></div>`;
    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.classify();
    });
  }

  private get form(): HTMLFormElement {
    return this.root.querySelector("form") as HTMLFormElement;
  }

  private get statusEl(): HTMLElement {
    return this.root.querySelector(".status") as HTMLElement;
  }

  private get resultsEl(): HTMLElement {
    return this.root.querySelector(".results") as HTMLElement;
  }

  async classify(): Promise<void> {
    const data = new FormData(this.form);
    const text = String(data.get("text") ?? "").trim();
    const language = String(data.get("language"));
    const task = String(data.get("task")) as Task;
    if (!text) {
      this.showError("Enter a tweet text first.");
      return;
    }
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.statusEl.textContent = "Classifying…";
    this.statusEl.className = "status pending";
    this.resultsEl.innerHTML = "";
    try {
      const { key } = await this.client.submit(text, language, task, controller.signal);
      const result = await pollResult(this.client, key, language, {
        ...this.pollOpts,
        signal: controller.signal,
      });
      if (controller.signal.aborted) return;
      if (result.status !== "done" || !result.results) {
        this.showError(`Classification failed: ${result.error ?? "unknown error"}`);
        return;
      }
      this.renderResults(result.results, task);
      this.statusEl.textContent = "";
      this.statusEl.className = "status";
    } catch (err) {
      if (controller.signal.aborted) return;
      if (err instanceof PollTimeoutError) {
        this.showTimeout();
      } else if (err instanceof ApiRequestError) {
        this.showError(`${err.code}: ${err.message}`);
      } else {
        this.showError(String(err));
      }
    }
  }

  private renderResults(results: QuestionResult[], task: Task): void {
    this.resultsEl.innerHTML = "";
    for (const entry of results) {
      const question = this.schema.questions.find((q) => q.id === entry.question);
      const card = document.createElement("section");
      card.className = "question-card";
      card.dataset.question = entry.question;
      card.innerHTML = `
        <h3>${entry.question}. ${question?.prompt ?? ""}</h3>
        <p class="summary">
          <strong class="top-label">${entry.label}</strong>
          <span class="top-probability">${(100 * entry.probability).toFixed(1)}%</span>
        </p>
        <div class="bars"></div>`;
      renderProbabilityBars(
        card.querySelector(".bars") as HTMLElement,
        labelOrder(this.schema, entry.question, task),
        entry.labels,
      );
      this.resultsEl.appendChild(card);
    }
  }

  private showError(message: string): void {
    this.statusEl.textContent = message;
    this.statusEl.className = "status error";
  }

  private showTimeout(): void {
    this.statusEl.innerHTML = `Still working after 10 s.
      <button type="button" class="retry">Retry</button>`;
    this.statusEl.className = "status timeout";
    (this.statusEl.querySelector(".retry") as HTMLButtonElement).addEventListener(
      "click",
      () => void this.classify(),
    );
  }
}
