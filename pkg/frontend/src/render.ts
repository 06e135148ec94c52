import type { Candidate, Progress, Sample } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** The sentence with the lengthened token wrapped in <mark>. */
export function renderSentence(sentence: string, rlfIndex: number): string {
  const tokens = sentence.split(/\s+/).filter((t) => t.length > 0);
  const parts = tokens.map((token, i) =>
    i === rlfIndex
      ? `<mark class="rlf">${escapeHtml(token)}</mark>`
      : escapeHtml(token),
  );
  return `<p class="sentence">${parts.join(" ")}</p>`;
}

/** One candidate as a labeled bar chart. Candidates are blind by design:
 * only the anonymous display id ever reaches the page. */
export function renderCandidate(candidate: Candidate, vote: number | null): string {
  const peak = Math.max(...candidate.scores, 0);
  const bars = candidate.tokens
    .map((token, i) => {
      const score = candidate.scores[i] ?? 0;
      const width = peak > 0 ? Math.round((score / peak) * 100) : 0;
      return (
        `<div class="bar-row">` +
        `<span class="bar-token">${escapeHtml(token)}</span>` +
        `<span class="bar" style="width:${width}%" title="${score.toFixed(3)}"></span>` +
        `</div>`
      );
    })
    .join("");
  const voteState =
    vote === null ? "unrated" : vote === 1 ? "rated-agree" : "rated-disagree";
  return (
    `<section class="candidate ${voteState}" data-candidate="${escapeHtml(candidate.candidate_id)}">` +
    `<h3>Candidate ${escapeHtml(candidate.candidate_id)}</h3>` +
    `<div class="bars">${bars}</div>` +
    `<div class="actions">` +
    `<button data-action="reliability" data-candidate-id="${escapeHtml(candidate.candidate_id)}" data-value="1">Looks right</button>` +
    `<button data-action="reliability" data-candidate-id="${escapeHtml(candidate.candidate_id)}" data-value="0">Looks wrong</button>` +
    `</div>` +
    `</section>`
  );
}

export function renderLabelButtons(current: number | null): string {
  const positive = current === 1 ? " selected" : "";
  const negative = current === 0 ? " selected" : "";
  return (
    `<div class="label-actions">` +
    `<button data-action="label" data-value="1" class="positive${positive}">Positive</button>` +
    `<button data-action="label" data-value="0" class="negative${negative}">Negative</button>` +
    `</div>`
  );
}

export function renderProgress(progress: Progress): string {
  return `<p class="progress">${progress.completed} of ${progress.total} samples done</p>`;
}

export function renderSample(sample: Sample): string {
  const candidates = sample.candidates
    .map((candidate) =>
      renderCandidate(candidate, sample.state.reliability[candidate.candidate_id] ?? null),
    )
    .join("");
  return (
    renderSentence(sample.sentence, sample.rlf_index) +
    renderLabelButtons(sample.state.label) +
    `<div class="candidates">${candidates}</div>`
  );
}

export function renderDone(progress: Progress): string {
  return (
    `<div class="done"><h2>All done</h2>` +
    renderProgress(progress) +
    `</div>`
  );
}
