import { App } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const app = new App(root, {
    createSocket: (url) => new WebSocket(url),
  });
  const proto = location.protocol === "https:" ? "wss" : "ws";
  app.connect(`${proto}://${location.host}/ws`);
}
