/** Queue-flow controller: the whole annotation session as a DOM-free
 * state machine so the flow rules are testable without a browser.
 *
 * State advances only on server acknowledgment (no optimistic UI) and
 * at most one request is in flight at a time. A network failure shows a
 * retry banner and loses nothing: the annotator id, counter, and any
 * current choice are retained.
 */

import { ApiClient, NetworkError, type TaskPayload } from "./api.js";
import {
  canSubmit,
  choiceForKey,
  submitBody,
  type Choice,
  type TaskView,
} from "./model.js";

export type SessionState =
  | { kind: "idle" }
  | { kind: "loading" }
  | { kind: "task"; task: TaskView }
  | { kind: "done" }
  | { kind: "error"; message: string; retry: () => Promise<void> };

export class Session {
  state: SessionState = { kind: "idle" };
  /** Annotations accepted by the server in this session. */
  submitted = 0;
  private busy = false;

  constructor(
    private readonly api: ApiClient,
    readonly annotatorId: string,
    private readonly onChange: (s: Session) => void = () => {},
  ) {
    if (!annotatorId) throw new Error("annotator id required");
  }

  private set(state: SessionState): void {
    this.state = state;
    this.onChange(this);
  }

  async start(): Promise<void> {
    await this.loadNext();
  }

  private async loadNext(): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    this.set({ kind: "loading" });
    try {
      const next = await this.api.fetchNext(this.annotatorId);
      if (next.kind === "done") {
        this.set({ kind: "done" });
      } else {
        this.set({ kind: "task", task: toView(next.task) });
      }
    } catch (err) {
      if (!(err instanceof NetworkError)) throw err;
      this.set({
        kind: "error",
        message: "Could not reach the annotation service.",
        retry: () => this.loadNext(),
      });
    } finally {
      this.busy = false;
    }
  }

  choose(choice: Choice): void {
    if (this.state.kind !== "task") return;
    this.set({ kind: "task", task: { ...this.state.task, choice } });
  }

  /** Keyboard shortcuts: 1/2/3/4 pick a choice, Enter submits. */
  handleKey(key: string): void {
    if (key === "Enter") {
      void this.submit();
      return;
    }
    const choice = choiceForKey(key);
    if (choice) this.choose(choice);
  }

  get submitEnabled(): boolean {
    return this.state.kind === "task" && canSubmit(this.state.task.choice);
  }

  async submit(): Promise<void> {
    if (this.busy || this.state.kind !== "task") return;
    const task = this.state.task;
    if (!canSubmit(task.choice)) return;
    this.busy = true;
    try {
      const result = await this.api.submit(submitBody(task, this.annotatorId));
      if (result.kind === "accepted") {
        this.submitted += 1;
      }
      // "duplicate" (409) skips forward with the counter unchanged;
      // "invalid" (400) should be unreachable given the form model, but
      // skipping is still the safe recovery.
      this.busy = false;
      await this.loadNext();
    } catch (err) {
      this.busy = false;
      if (!(err instanceof NetworkError)) throw err;
      this.set({
        kind: "error",
        message: "Submission failed; your choice is kept.",
        retry: async () => {
          this.set({ kind: "task", task });
          await this.submit();
        },
      });
    }
  }
}

function toView(task: TaskPayload): TaskView {
  return {
    sampleId: task.sample_id,
    imageUrl: task.image,
    description: task.description,
    choice: { kind: "undecided" },
  };
}
