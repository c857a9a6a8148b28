/**
 * End-to-end: the chat client against a real service process on the
 * bundled data. Covers the full correction loop: ask, not-satisfied,
 * cause=intent, corrected label, automatic re-ask, intents panel refresh.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { KbqaClient } from "../src/api.js";
import { ChatApp } from "../src/app.js";

const PORT = 8000 + Math.floor(Math.random() * 1000);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = resolve(__dirname, "..", "..");

let server: ChildProcess;

async function waitForService(timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/healthz`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "kbqa-ui-e2e-"));
  const configPath = join(dir, "config.json");
  writeFileSync(configPath, JSON.stringify({ host: "127.0.0.1", port: PORT }));
  server = spawn("python3", ["-m", "kbqa.cli", "serve", "--config", configPath], {
    cwd: REPO_ROOT,
    stdio: "ignore",
  });
  await waitForService();
});

afterAll(() => {
  server?.kill();
});

async function settled(): Promise<void> {
  await new Promise((r) => setTimeout(r, 50));
}

describe("chat client against the live service", () => {
  it("completes ask -> correction -> auto re-ask with the learned intent", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app")!;
    const app = new ChatApp(root, new KbqaClient(BASE));
    await settled(); // initial intents fetch

    const question = "What peers operate in the cedar pharma industry?";
    await app.submitQuestion(question);

    // First pass lands on the wrong similarity neighbor.
    let badge = [...root.querySelectorAll(".badge")].at(-1)!;
    expect(badge.getAttribute("data-label")).toBe("company_industry");

    root.querySelector<HTMLButtonElement>(".btn-unsatisfied")!.click();
    await settled();
    expect(root.querySelector(".btn-cause-intent")).not.toBeNull();

    root.querySelector<HTMLButtonElement>(".btn-cause-intent")!.click();
    await settled();
    const input = root.querySelector<HTMLInputElement>(".intent-input")!;
    input.value = "industry_peers";
    root.querySelector<HTMLButtonElement>(".btn-intent-submit")!.click();

    // The submit handler confirms, refreshes intents, and re-asks.
    const deadline = Date.now() + 10_000;
    while (Date.now() < deadline) {
      badge = [...root.querySelectorAll(".badge")].at(-1)!;
      if (badge.getAttribute("data-label") === "industry_peers") break;
      await settled();
    }

    badge = [...root.querySelectorAll(".badge")].at(-1)!;
    expect(badge.getAttribute("data-method")).toBe("embedding");
    expect(badge.getAttribute("data-label")).toBe("industry_peers");

    const answerTexts = [...root.querySelectorAll(".answer-text")].map((n) => n.textContent ?? "");
    expect(answerTexts.at(-1)).toContain("beacon pharma");

    expect(root.querySelector(".intents-panel")!.textContent).toContain("industry_peers");
  }, 120_000);

  it("renders the worked example with grounded rows", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app")!;
    const app = new ChatApp(root, new KbqaClient(BASE));
    await app.submitQuestion("Where is the headquarters of Wanke company located?");
    expect([...root.querySelectorAll(".rows-table td")].map((c) => c.textContent)).toContain("Shenzhen");
    const badge = root.querySelector(".badge")!;
    expect(["rule", "embedding"]).toContain(badge.getAttribute("data-method"));
  }, 120_000);
});
