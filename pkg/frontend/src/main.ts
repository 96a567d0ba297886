import { makeClient } from "./api.js";
import { SessionPage } from "./session.js";
import { Wizard } from "./wizard.js";

const SESSION_HASH = /^#\/session\/([0-9a-f]+)$/;

function route(): void {
  const wizardView = document.querySelector("#wizard-view") as HTMLElement;
  const sessionView = document.querySelector("#session-view") as HTMLElement;
  const match = SESSION_HASH.exec(window.location.hash);
  wizardView.hidden = match !== null;
  sessionView.hidden = match === null;
  if (match) {
    const page = new SessionPage(document, makeClient(), match[1]);
    void page.load(true);
  }
}

function boot(): void {
  new Wizard(document, makeClient(), (view) => {
    window.location.hash = `#/session/${view.session_id}`;
  });
  window.addEventListener("hashchange", route);
  route();
}

boot();
