import { ApiClient } from "./api.js";
import { AnnotationFlow } from "./flow.js";
import { renderDone, renderProgress, renderSample } from "./render.js";

/** Wire the flow to a root element. Exported for tests; the bottom of the
 * file bootstraps it in a real browser only. */
export function init(root: HTMLElement, api: ApiClient, annotatorId: string): AnnotationFlow {
  const flow = new AnnotationFlow(api, annotatorId);

  const redraw = () => {
    if (flow.done) {
      root.innerHTML = renderDone(flow.progress);
      return;
    }
    const sample = flow.current;
    if (sample === null) {
      root.innerHTML = `<p class="empty">Nothing to annotate.</p>`;
      return;
    }
    root.innerHTML = renderProgress(flow.progress) + renderSample(sample);
  };

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement | null;
    const button = target?.closest<HTMLElement>("button[data-action]");
    if (!button) return;
    const value = Number(button.dataset.value) as 0 | 1;
    const run = async () => {
      if (button.dataset.action === "label") {
        await flow.chooseLabel(value);
      } else if (button.dataset.action === "reliability") {
        await flow.rateCandidate(button.dataset.candidateId ?? "", value);
      }
      if (flow.isComplete()) {
        await flow.advance();
      }
      redraw();
    };
    void run().catch((error) => {
      root.insertAdjacentHTML(
        "beforeend",
        `<p class="error">${String(error)}</p>`,
      );
    });
  });

  void flow.load().then(redraw);
  return flow;
}

declare const document: Document | undefined;

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    const params = new URLSearchParams(window.location.search);
    const annotatorId = params.get("annotator") ?? "anonymous";
    const base = params.get("api") ?? "";
    init(root, new ApiClient(base), annotatorId);
  }
}
