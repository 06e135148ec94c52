/** Wire types of the annotation HTTP API. Candidates arrive anonymized:
 * the server only ever exposes display ids ("A", "B", ...), never the
 * model behind them. */

export type AnnotationKind = "SentimentLabel" | "Reliability";

export interface Candidate {
  candidate_id: string;
  tokens: string[];
  scores: number[];
}

export interface SampleState {
  label: number | null;
  /** Reliability votes already stored for this annotator, by candidate id. */
  reliability: Record<string, number>;
}

export interface Sample {
  sample_id: string;
  sentence: string;
  rlf_index: number;
  candidates: Candidate[];
  state: SampleState;
}

export interface Progress {
  completed: number;
  total: number;
}

export interface NextResponse {
  done: boolean;
  progress: Progress;
  sample: Sample | null;
}

export interface PostResponse {
  stored: boolean;
  progress: Progress;
}

export interface ProgressResponse {
  total_samples: number;
  effective_records: number;
  appended_records: number;
  annotators: Record<string, { completed: number }>;
}

export interface AggregateResponse {
  labels: Record<string, number | "unresolved">;
  mean_reliability: Record<string, number>;
  alpha: number | null;
  n_annotations: number;
}

export interface AnnotationIn {
  sample_id: string;
  annotator_id: string;
  kind: AnnotationKind;
  value: 0 | 1;
  candidate_id?: string;
}
