import { ApiClient } from "./api.js";
import { AnalyticsPanel } from "./analytics.js";
import { ClassifierPanel } from "./classifier.js";

async function bootstrap(): Promise<void> {
  const client = new ApiClient("");
  const classifierRoot = document.getElementById("classifier-panel");
  const analyticsRoot = document.getElementById("analytics-panel");
  if (!classifierRoot || !analyticsRoot) {
    throw new Error("missing panel containers");
  }
  try {
    const schema = await client.getSchema();
    new ClassifierPanel(classifierRoot, client, schema);
    new AnalyticsPanel(analyticsRoot, client, schema);
  } catch (err) {
    classifierRoot.innerHTML =
      `<div class="status error">Cannot reach the classification API: ${String(err)}</div>`;
  }
}

void bootstrap();
