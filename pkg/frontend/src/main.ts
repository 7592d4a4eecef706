import { ApiClient } from "./api.js";
import { AnswerSubmitter, DashboardState, emptyState, poll } from "./dashboard.js";
import { renderDashboard } from "./render.js";

const POLL_MS = 1000;

export function start(root: HTMLElement, baseUrl = "", actor = "alice"): () => void {
  const client = new ApiClient(baseUrl);
  let state: DashboardState = emptyState(actor);
  let submitter: AnswerSubmitter | null = null;

  root.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (!target.classList.contains("option")) return;
    const requestId = target.dataset.request;
    if (!submitter || submitter.request.id !== requestId || submitter.done) return;
    const raw = target.dataset.chosen ?? "";
    const chosen = raw === "" ? null : Number(raw);
    void submitter.submit(chosen);
  });

  const tick = async () => {
    state = await poll(client, state);
    const pending = state.pending[0];
    if (pending && (!submitter || submitter.request.id !== pending.id)) {
      submitter = new AnswerSubmitter(client, actor, pending);
    }
    if (!pending) {
      submitter = null;
    }
    root.innerHTML = renderDashboard(state);
  };

  void tick();
  const timer = setInterval(() => void tick(), POLL_MS);
  return () => clearInterval(timer);
}
