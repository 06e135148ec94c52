import { describe, expect, it } from "vitest";

import {
  escapeHtml,
  renderCandidate,
  renderDone,
  renderLabelButtons,
  renderProgress,
  renderSample,
  renderSentence,
} from "../src/render.js";
import type { Sample } from "../src/types.js";

const SAMPLE: Sample = {
  sample_id: "smp0",
  sentence: "we loooove this place so",
  rlf_index: 1,
  candidates: [
    { candidate_id: "A", tokens: ["we", "loooove", "this", "place", "so"], scores: [0.1, 0.6, 0.2, 0.05, 0.05] },
    { candidate_id: "B", tokens: ["we", "loooove", "this", "place", "so"], scores: [0.2, 0.2, 0.2, 0.2, 0.2] },
  ],
  state: { label: null, reliability: {} },
};

describe("escapeHtml", () => {
  it("escapes the five specials", () => {
    expect(escapeHtml(`<b>&"'`)).toBe("&lt;b&gt;&amp;&quot;&#39;");
  });

  it("passes plain text through", () => {
    expect(escapeHtml("loooove it")).toBe("loooove it");
  });
});

describe("renderSentence", () => {
  it("marks exactly the lengthened token", () => {
    const html = renderSentence("we loooove this place so", 1);
    expect(html).toContain(`<mark class="rlf">loooove</mark>`);
    expect(html.match(/<mark/g)).toHaveLength(1);
    expect(html).toContain("we ");
  });

  it("escapes sentence content", () => {
    const html = renderSentence("bad <script> day!!!!", 1);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("renderCandidate", () => {
  it("draws one bar per token, scaled to the peak score", () => {
    const html = renderCandidate(SAMPLE.candidates[0]!, null);
    expect(html.match(/bar-row/g)).toHaveLength(5);
    expect(html).toContain(`width:100%`); // the 0.6 peak
    expect(html).toContain(`width:17%`); // 0.1 of 0.6
  });

  it("shows only the anonymous candidate id", () => {
    const html = renderCandidate(SAMPLE.candidates[0]!, null);
    expect(html).toContain("Candidate A");
    expect(html.toLowerCase()).not.toContain("model");
  });

  it("carries reliability buttons for both votes", () => {
    const html = renderCandidate(SAMPLE.candidates[1]!, null);
    expect(html).toContain(`data-action="reliability"`);
    expect(html).toContain(`data-candidate-id="B"`);
    expect(html).toContain(`data-value="1"`);
    expect(html).toContain(`data-value="0"`);
  });

  it("reflects an existing vote in the class list", () => {
    expect(renderCandidate(SAMPLE.candidates[0]!, 1)).toContain("rated-agree");
    expect(renderCandidate(SAMPLE.candidates[0]!, 0)).toContain("rated-disagree");
    expect(renderCandidate(SAMPLE.candidates[0]!, null)).toContain("unrated");
  });

  it("survives an all-zero score vector", () => {
    const html = renderCandidate(
      { candidate_id: "A", tokens: ["a", "b"], scores: [0, 0] },
      null,
    );
    expect(html.match(/width:0%/g)).toHaveLength(2);
  });
});

describe("renderLabelButtons", () => {
  it("marks the chosen label", () => {
    expect(renderLabelButtons(1)).toContain(`class="positive selected"`);
    expect(renderLabelButtons(0)).toContain(`class="negative selected"`);
    expect(renderLabelButtons(null)).not.toContain("selected");
  });
});

describe("renderSample", () => {
  it("combines sentence, labels, and all candidates", () => {
    const html = renderSample(SAMPLE);
    expect(html).toContain("<mark");
    expect(html).toContain("Candidate A");
    expect(html).toContain("Candidate B");
    expect(html).toContain(`data-action="label"`);
  });

  it("never leaks anything but candidate display ids", () => {
    const html = renderSample(SAMPLE);
    expect(html.toLowerCase()).not.toContain("model");
  });

  it("prefills stored votes", () => {
    const seen: Sample = {
      ...SAMPLE,
      state: { label: 1, reliability: { A: 0 } },
    };
    const html = renderSample(seen);
    expect(html).toContain(`class="positive selected"`);
    expect(html).toContain("rated-disagree");
  });
});

describe("progress and done", () => {
  it("renders counts", () => {
    expect(renderProgress({ completed: 3, total: 10 })).toContain("3 of 10");
  });

  it("renders the done card", () => {
    const html = renderDone({ completed: 10, total: 10 });
    expect(html).toContain("All done");
    expect(html).toContain("10 of 10");
  });
});
