import type { ApiClient } from "./api.js";
import type { Progress, Sample } from "./types.js";

/** Session state machine for one annotator.
 *
 * The server is the source of truth: every vote posts immediately, local
 * state mirrors what the server confirmed, and a page reload resumes from
 * the sample the server says is next. A sample is complete once it has a
 * sentiment label and a reliability vote for every candidate; only then
 * does `advance` move on.
 */
export class AnnotationFlow {
  private sample: Sample | null = null;
  private progressState: Progress = { completed: 0, total: 0 };
  private finished = false;

  constructor(
    private readonly api: ApiClient,
    readonly annotatorId: string,
  ) {}

  get current(): Sample | null {
    return this.sample;
  }

  get progress(): Progress {
    return this.progressState;
  }

  get done(): boolean {
    return this.finished;
  }

  /** Fetch the next incomplete sample from the server. */
  async load(): Promise<void> {
    const response = await this.api.next(this.annotatorId);
    this.finished = response.done;
    this.sample = response.sample;
    this.progressState = response.progress;
  }

  async chooseLabel(value: 0 | 1): Promise<void> {
    const sample = this.require();
    const response = await this.api.submit({
      sample_id: sample.sample_id,
      annotator_id: this.annotatorId,
      kind: "SentimentLabel",
      value,
    });
    sample.state.label = value;
    this.progressState = response.progress;
  }

  async rateCandidate(candidateId: string, value: 0 | 1): Promise<void> {
    const sample = this.require();
    if (!sample.candidates.some((c) => c.candidate_id === candidateId)) {
      throw new Error(`unknown candidate ${candidateId}`);
    }
    const response = await this.api.submit({
      sample_id: sample.sample_id,
      annotator_id: this.annotatorId,
      kind: "Reliability",
      value,
      candidate_id: candidateId,
    });
    sample.state.reliability[candidateId] = value;
    this.progressState = response.progress;
  }

  /** True once the current sample has a label and every candidate rated. */
  isComplete(): boolean {
    const sample = this.sample;
    if (sample === null) return false;
    if (sample.state.label === null) return false;
    return sample.candidates.every(
      (c) => sample.state.reliability[c.candidate_id] !== undefined,
    );
  }

  /** Move to the next sample; no-op until the current one is complete. */
  async advance(): Promise<boolean> {
    if (!this.isComplete()) return false;
    await this.load();
    return true;
  }

  private require(): Sample {
    if (this.sample === null) {
      throw new Error("no sample loaded");
    }
    return this.sample;
  }
}
