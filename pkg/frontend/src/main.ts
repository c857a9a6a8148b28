import { mount } from "./app.js";

const root = document.getElementById("app");
if (root) {
  // Served by the API process under /ui, so the API origin is our own.
  mount(root, "");
}
