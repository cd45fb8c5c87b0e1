import { init } from "./app.js";

const root = document.getElementById("app");
if (root) {
  void init(root, {
    fetchImpl: (url: string) => fetch(url),
    audioContext: () => new AudioContext(),
  });
}
