/**
 * Chat application: wires the API client, the transcript, the feedback
 * dialogue, and the live intents panel together.
 *
 * The feedback control set mirrors the server's session states; every
 * transition happens only after the server confirmed it. One /ask is in
 * flight at a time and inputs are disabled while waiting.
 */

import { ApiError, KbqaClient, QaApi } from "./api.js";
import {
  FeedbackControls,
  answerTurn,
  el,
  errorBanner,
  intentsList,
  systemTurn,
  userTurn,
} from "./components.js";

export class ChatApp {
  readonly chatLog: HTMLElement;
  readonly input: HTMLInputElement;
  readonly sendButton: HTMLButtonElement;
  readonly bannerSlot: HTMLElement;
  readonly intentsPanel: HTMLElement;

  sessionId: string | null = null;
  lastQuestion: string | null = null;
  private activeControls: FeedbackControls | null = null;
  private busy = false;

  constructor(root: HTMLElement, private client: QaApi) {
    root.textContent = "";
    const layout = el("div", "layout");

    const aside = el("aside", "sidebar");
    aside.appendChild(el("h2", undefined, "Intent library"));
    this.intentsPanel = el("div", "intents-panel");
    this.intentsPanel.appendChild(el("p", "loading", "loading…"));
    aside.appendChild(this.intentsPanel);

    const main = el("main", "chat-main");
    this.bannerSlot = el("div", "banner-slot");
    this.chatLog = el("div", "chat-log");

    const composer = el("form", "composer");
    this.input = el("input", "question-input");
    this.input.placeholder = "Ask about the financial graph…";
    this.sendButton = el("button", "send-btn", "Send");
    this.sendButton.type = "submit";
    this.sendButton.disabled = true;
    this.input.addEventListener("input", () => this.syncSendState());
    composer.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitQuestion(this.input.value);
    });
    composer.appendChild(this.input);
    composer.appendChild(this.sendButton);

    main.appendChild(this.bannerSlot);
    main.appendChild(this.chatLog);
    main.appendChild(composer);
    layout.appendChild(aside);
    layout.appendChild(main);
    root.appendChild(layout);

    void this.refreshIntents();
  }

  private syncSendState(): void {
    this.sendButton.disabled = this.busy || this.input.value.trim() === "";
  }

  private setBusy(busy: boolean): void {
    this.busy = busy;
    this.input.disabled = busy;
    this.syncSendState();
  }

  private showBanner(message: string, onRetry?: () => void): void {
    this.bannerSlot.textContent = "";
    this.bannerSlot.appendChild(errorBanner(message, onRetry));
  }

  private clearBanner(): void {
    this.bannerSlot.textContent = "";
  }

  private append(node: HTMLElement): void {
    this.chatLog.appendChild(node);
    this.chatLog.scrollTop = this.chatLog.scrollHeight;
  }

  /** Ask a question; renders the user turn, the answer turn, and a fresh
   * feedback control set. Returns when the exchange is fully rendered. */
  async submitQuestion(question: string): Promise<void> {
    const text = question.trim();
    if (!text || this.busy) return;
    this.clearBanner();
    this.activeControls?.close();
    this.append(userTurn(text));
    this.input.value = "";
    this.setBusy(true);
    try {
      const response = await this.client.ask(text, this.sessionId);
      this.sessionId = response.session_id;
      this.lastQuestion = text;
      this.append(answerTurn(response.answer));
      this.activeControls = new FeedbackControls({
        onSatisfied: (ok) => void this.markSatisfied(ok),
        onCause: (cause) => void this.giveCause(cause),
        onIntent: (label) => void this.giveIntent(label),
      });
      this.append(this.activeControls.root);
    } catch (error) {
      this.renderAskError(error, text);
    } finally {
      this.setBusy(false);
    }
  }

  private renderAskError(error: unknown, question: string): void {
    if (!(error instanceof ApiError)) {
      this.showBanner("The service is unreachable.", () => void this.submitQuestion(question));
      return;
    }
    if (error.code === "unresolved_intent") {
      this.append(systemTurn(
        "I could not work out what you are asking for. Try rephrasing the question."));
      this.showBanner(error.message);
    } else if (error.code === "no_template") {
      const intent = String(error.detail["intent"] ?? "unknown");
      this.append(systemTurn(
        `I understood the intent "${intent}" but have no query for it yet.`));
      if (typeof error.detail["session_id"] === "string") {
        this.sessionId = error.detail["session_id"];
      }
      this.showBanner(error.message);
    } else if (error.code === "arity_mismatch") {
      this.append(systemTurn("Please name the missing entity and ask again."));
      this.showBanner(error.message);
    } else {
      this.showBanner(error.message, () => void this.submitQuestion(question));
    }
  }

  /** Handles wrong_state answers by resetting the control to the state the
   * server reported; everything else surfaces as a banner. */
  private async step(action: () => Promise<{ text: string; state: string }>): Promise<{ text: string; state: string } | null> {
    if (!this.sessionId || !this.activeControls) return null;
    try {
      return await action();
    } catch (error) {
      if (error instanceof ApiError && error.code === "wrong_state") {
        this.append(systemTurn("That step is not available right now."));
        this.activeControls.close();
        return null;
      }
      if (error instanceof ApiError && error.code === "unknown_session") {
        this.activeControls.close();
        this.showBanner("This conversation expired; ask a fresh question.");
        return null;
      }
      this.showBanner(error instanceof Error ? error.message : String(error));
      return null;
    }
  }

  async markSatisfied(ok: boolean): Promise<void> {
    const result = await this.step(() => this.client.feedback(this.sessionId!, "satisfied", ok));
    if (!result) return;
    if (ok) {
      this.append(systemTurn(result.text));
      this.activeControls?.close();
    } else {
      this.activeControls?.showCause(result.text);
    }
  }

  async giveCause(cause: "intent" | "other"): Promise<void> {
    const result = await this.step(() => this.client.feedback(this.sessionId!, "cause", cause));
    if (!result) return;
    if (cause === "other") {
      this.append(systemTurn(result.text));
      this.activeControls?.close();
    } else {
      this.activeControls?.showIntentInput(result.text);
    }
  }

  /** Final correction step: confirm, refresh the intents panel, and
   * automatically re-ask the corrected question. */
  async giveIntent(label: string): Promise<void> {
    const result = await this.step(() => this.client.feedback(this.sessionId!, "intent", label));
    if (!result) return;
    this.append(systemTurn(result.text));
    this.activeControls?.close();
    this.activeControls = null;
    await this.refreshIntents();
    if (this.lastQuestion) {
      await this.submitQuestion(this.lastQuestion);
    }
  }

  async refreshIntents(): Promise<void> {
    try {
      const intents = await this.client.intents();
      this.intentsPanel.textContent = "";
      this.intentsPanel.appendChild(intentsList(intents));
    } catch {
      this.intentsPanel.textContent = "";
      this.intentsPanel.appendChild(el("p", "load-failed", "intent list unavailable"));
    }
  }
}

export function mount(root: HTMLElement, baseUrl = ""): ChatApp {
  return new ChatApp(root, new KbqaClient(baseUrl));
}
