/**
 * DOM builders for the chat. Plain createElement components: every value
 * shown comes from the service response passed in.
 */

import { AnswerView, IntentInfo } from "./api.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function userTurn(text: string): HTMLElement {
  const turn = el("div", "turn turn-user");
  turn.appendChild(el("div", "bubble", text));
  return turn;
}

export function systemTurn(text: string): HTMLElement {
  const turn = el("div", "turn turn-system");
  turn.appendChild(el("div", "bubble", text));
  return turn;
}

function rowsTable(rows: Record<string, string | number>[]): HTMLElement {
  const first = rows[0];
  if (!first) return el("p", "empty-rows", "no rows");
  const table = el("table", "rows-table");
  const header = el("tr");
  for (const column of Object.keys(first)) {
    header.appendChild(el("th", undefined, column));
  }
  table.appendChild(header);
  for (const row of rows) {
    const tr = el("tr");
    for (const value of Object.values(row)) {
      tr.appendChild(el("td", undefined, String(value)));
    }
    table.appendChild(tr);
  }
  return table;
}

function knowledgePanel(answer: AnswerView): HTMLElement {
  const details = el("details", "knowledge-panel");
  details.appendChild(el("summary", undefined, "knowledge"));
  const cql = el("pre", "cql");
  cql.textContent = answer.cql;
  details.appendChild(cql);
  details.appendChild(rowsTable(answer.rows));
  const trace = el("ul", "trace");
  for (const step of answer.trace) {
    trace.appendChild(el("li", undefined, `${step.stage}: ${step.detail}`));
  }
  details.appendChild(trace);
  return details;
}

export function methodBadge(answer: AnswerView): HTMLElement {
  const r = answer.recognition;
  const badge = el("span", `badge badge-${r.method}`,
    `${r.method} ${r.score.toFixed(2)} · ${r.label}`);
  badge.setAttribute("data-method", r.method);
  badge.setAttribute("data-label", r.label);
  return badge;
}

export function answerTurn(answer: AnswerView): HTMLElement {
  const turn = el("div", "turn turn-system turn-answer");
  const bubble = el("div", "bubble");
  bubble.appendChild(el("p", "answer-text", answer.answer_text));
  bubble.appendChild(methodBadge(answer));
  bubble.appendChild(knowledgePanel(answer));
  turn.appendChild(bubble);
  return turn;
}

export interface FeedbackHandlers {
  onSatisfied(ok: boolean): void;
  onCause(cause: "intent" | "other"): void;
  onIntent(label: string): void;
}

/** The one active feedback control set; stages are swapped in-place so a
 * session never shows two live control sets. */
export class FeedbackControls {
  readonly root: HTMLElement;

  constructor(private handlers: FeedbackHandlers) {
    this.root = el("div", "feedback-controls");
    this.showSatisfied();
  }

  private button(text: string, onClick: () => void, className = ""): HTMLButtonElement {
    const b = el("button", `feedback-btn ${className}`.trim(), text);
    b.type = "button";
    b.addEventListener("click", onClick);
    return b;
  }

  private clear(): void {
    this.root.textContent = "";
  }

  showSatisfied(): void {
    this.clear();
    this.root.appendChild(this.button("Satisfied", () => this.handlers.onSatisfied(true), "btn-satisfied"));
    this.root.appendChild(this.button("Not satisfied", () => this.handlers.onSatisfied(false), "btn-unsatisfied"));
  }

  showCause(prompt: string): void {
    this.clear();
    this.root.appendChild(el("p", "feedback-prompt", prompt));
    this.root.appendChild(this.button("The intent was misunderstood", () => this.handlers.onCause("intent"), "btn-cause-intent"));
    this.root.appendChild(this.button("Something else was wrong", () => this.handlers.onCause("other"), "btn-cause-other"));
  }

  showIntentInput(prompt: string): void {
    this.clear();
    this.root.appendChild(el("p", "feedback-prompt", prompt));
    const input = el("input", "intent-input");
    input.placeholder = "correct intent label";
    const submit = this.button("Teach it", () => {
      if (input.value.trim()) this.handlers.onIntent(input.value.trim());
    }, "btn-intent-submit");
    this.root.appendChild(input);
    this.root.appendChild(submit);
  }

  close(): void {
    this.clear();
    this.root.classList.add("closed");
  }
}

export function intentsList(intents: IntentInfo[]): HTMLElement {
  const list = el("ul", "intents-list");
  if (intents.length === 0) {
    list.appendChild(el("li", "empty", "no intents learned yet"));
    return list;
  }
  for (const intent of intents) {
    list.appendChild(el("li", "intent-item", `${intent.label} (${intent.example_count})`));
  }
  return list;
}

export function errorBanner(message: string, onRetry?: () => void): HTMLElement {
  const banner = el("div", "banner banner-error");
  banner.appendChild(el("span", undefined, message));
  if (onRetry) {
    const retry = el("button", "banner-retry", "Retry");
    retry.type = "button";
    retry.addEventListener("click", onRetry);
    banner.appendChild(retry);
  }
  return banner;
}
