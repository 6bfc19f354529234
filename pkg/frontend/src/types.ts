export interface SchemaLabel {
  code: string;
  text: string;
  binary: "yes" | "no";
}

export interface SchemaQuestion {
  id: string;
  prompt: string;
  labels: SchemaLabel[];
}

export interface ApiSchema {
  version: number;
  tasks: string[];
  binary_labels: string[];
  questions: SchemaQuestion[];
}

export type Task = "binary" | "multiclass";

export interface SubmitResponse {
  key: string;
  message: string;
}

export interface QuestionResult {
  question: string;
  label: string;
  probability: number;
  labels: Record<string, number>;
}

export interface ClassifyResult {
  key: string;
  status: "pending" | "done" | "failed";
  results?: QuestionResult[];
  error?: string;
}

export interface DayBucket {
  date: string; // ISO day
  counts: Record<string, number>;
}

export interface AggregatesResponse {
  question: string;
  task: string;
  buckets: DayBucket[];
}

export interface ApiError {
  error: string;
  message: string;
}

/** Ordered label list for one question and task, from the schema. */
export function labelOrder(schema: ApiSchema, questionId: string, task: Task): string[] {
  if (task === "binary") {
    return [...schema.binary_labels];
  }
  const question = schema.questions.find((q) => q.id === questionId);
  if (!question) {
    throw new Error(`unknown question ${questionId}`);
  }
  return question.labels.map((l) => l.text);
}
