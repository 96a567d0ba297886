import { makeClient } from "./api.js";
import { SessionPage } from "./session.js";
import { Wizard } from "./wizard.js";
const SESSION_HASH = /^#\/session\/([0-9a-f]+)$/;
function route() {
    const wizardView = document.querySelector("#wizard-view");
    const sessionView = document.querySelector("#session-view");
    const match = SESSION_HASH.exec(window.location.hash);
    wizardView.hidden = match !== null;
    sessionView.hidden = match === null;
    if (match) {
        const page = new SessionPage(document, makeClient(), match[1]);
        void page.load(true);
    }
}
function boot() {
    new Wizard(document, makeClient(), (view) => {
        window.location.hash = `#/session/${view.session_id}`;
    });
    window.addEventListener("hashchange", route);
    route();
}
boot();
