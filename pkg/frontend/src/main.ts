/** DOM wiring for the single-page annotation client. */

import { ApiClient } from "./api.js";
import { CATEGORY_ORDER, type Choice } from "./model.js";
import { Session } from "./session.js";

const $ = (id: string): HTMLElement => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
};

function choiceLabel(choice: Choice): string {
  if (choice.kind === "undecided") return "";
  if (choice.kind === "clean") return "clean";
  return `hallucinated / ${choice.category}`;
}

function render(session: Session): void {
  const state = session.state;
  $("counter").textContent = `${session.submitted} submitted`;
  $("banner").hidden = state.kind !== "error";
  $("task").hidden = state.kind !== "task";
  $("done").hidden = state.kind !== "done";
  $("loading").hidden = state.kind !== "loading";
  if (state.kind === "error") {
    $("banner-message").textContent = state.message;
    ($("retry") as HTMLButtonElement).onclick = () => void state.retry();
  }
  if (state.kind === "task") {
    ($("image") as HTMLImageElement).src = state.task.imageUrl;
    $("description").textContent = state.task.description;
    $("choice").textContent = choiceLabel(state.task.choice);
    ($("submit") as HTMLButtonElement).disabled = !session.submitEnabled;
  }
}

function buildButtons(session: Session): void {
  const row = $("choices");
  const add = (label: string, key: string, choice: Choice) => {
    const btn = document.createElement("button");
    btn.textContent = `${key} · ${label}`;
    btn.onclick = () => session.choose(choice);
    row.appendChild(btn);
  };
  add("clean", "1", { kind: "clean" });
  CATEGORY_ORDER.forEach((category, i) =>
    add(category, String(i + 2), { kind: "hallucinated", category }),
  );
}

function boot(): void {
  const form = $("login") as HTMLFormElement;
  form.onsubmit = (ev) => {
    ev.preventDefault();
    const annotator = ($("annotator") as HTMLInputElement).value.trim();
    if (!annotator) return;
    form.hidden = true;
    const api = new ApiClient("");
    const session = new Session(api, annotator, render);
    buildButtons(session);
    ($("submit") as HTMLButtonElement).onclick = () => void session.submit();
    document.addEventListener("keydown", (ev) => {
      if ((ev.target as HTMLElement)?.tagName === "INPUT") return;
      session.handleKey(ev.key);
    });
    void session.start();
  };
}

document.addEventListener("DOMContentLoaded", boot);
