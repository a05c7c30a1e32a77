import { createApp } from "./app.js";

createApp(document.getElementById("app") as HTMLElement, (url, init) =>
  fetch(url, {
    method: init?.method,
    body: init?.body as BodyInit | undefined,
    headers: init?.headers,
    signal: init?.signal,
  }),
);
